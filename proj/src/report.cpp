#include "sparselms/report.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "sparselms/errors.hpp"

namespace sparselms {

namespace {

using Json = nlohmann::ordered_json;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double read_number(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json number_array(const std::vector<double>& values) {
  Json arr = Json::array();
  for (double v : values) arr.push_back(number_or_null(v));
  return arr;
}

std::vector<double> read_array(const Json& j) {
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(read_number(v));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  }
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed: " + std::strerror(errno));
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "': " + std::strerror(errno));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json analysis_to_json(const AnalysisBlock& a) {
  Json j;
  j["iteration"] = a.iteration;
  j["sigma2_n"] = number_or_null(a.sigma2_n);
  j["eta"] = number_or_null(a.eta);
  j["xi_standard"] = number_or_null(a.xi_standard);
  j["alpha_prime"] = number_or_null(a.alpha_prime);
  j["beta_prime"] = number_or_null(a.beta_prime);
  j["beta_bound"] = number_or_null(a.beta_bound);
  j["xi_rl1_predicted"] = number_or_null(a.xi_rl1_predicted);
  j["rho_star"] = a.rho_star ? number_or_null(*a.rho_star) : Json(nullptr);
  Json emp = Json::object();
  for (const auto& [k, v] : a.xi_empirical) emp[k] = number_or_null(v);
  j["xi_empirical"] = emp;
  return j;
}

AnalysisBlock analysis_from_json(const Json& j) {
  AnalysisBlock a;
  a.iteration = j.at("iteration").get<std::size_t>();
  a.sigma2_n = read_number(j.at("sigma2_n"));
  a.eta = read_number(j.at("eta"));
  a.xi_standard = read_number(j.at("xi_standard"));
  a.alpha_prime = read_number(j.at("alpha_prime"));
  a.beta_prime = read_number(j.at("beta_prime"));
  a.beta_bound = read_number(j.at("beta_bound"));
  a.xi_rl1_predicted = read_number(j.at("xi_rl1_predicted"));
  if (!j.at("rho_star").is_null()) a.rho_star = j.at("rho_star").get<double>();
  for (const auto& [k, v] : j.at("xi_empirical").items()) a.xi_empirical[k] = read_number(v);
  return a;
}

Json case_to_json(const CaseReport& c) {
  Json j;
  j["label"] = c.label;
  Json params = Json::object();
  for (const auto& [k, v] : c.parameters) params[k] = v;
  j["parameters"] = params;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["completed_runs"] = c.completed_runs;
  j["diverged_runs"] = c.diverged_runs;
  j["iterations"] = c.iterations;
  j["mean_noise_variance"] = number_or_null(c.mean_noise_variance);
  j["algorithms"] = c.algorithms;
  j["metrics"] = c.metrics;
  Json series = Json::object();
  for (const auto& [k, s] : c.series) {
    series[k] = Json{{"mean", number_array(s.mean)}, {"stddev", number_array(s.stddev)}};
  }
  j["series"] = series;
  Json steady = Json::object();
  for (const auto& [k, s] : c.steady) {
    steady[k] = Json{{"mean", number_or_null(s.mean)},
                     {"stddev", number_or_null(s.stddev)},
                     {"window_begin", s.window_begin},
                     {"window_length", s.window_length}};
  }
  j["steady_state"] = steady;
  j["divergence_messages"] = c.divergence_messages;
  if (c.analysis) j["analysis"] = analysis_to_json(*c.analysis);
  return j;
}

CaseReport case_from_json(const Json& j) {
  CaseReport c;
  c.label = j.at("label").get<std::string>();
  for (const auto& [k, v] : j.at("parameters").items()) c.parameters[k] = v.get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.runs = j.at("runs").get<std::size_t>();
  c.completed_runs = j.at("completed_runs").get<std::size_t>();
  c.diverged_runs = j.at("diverged_runs").get<std::size_t>();
  c.iterations = j.at("iterations").get<std::size_t>();
  c.mean_noise_variance = read_number(j.at("mean_noise_variance"));
  c.algorithms = j.at("algorithms").get<std::vector<std::string>>();
  c.metrics = j.at("metrics").get<std::vector<std::string>>();
  for (const auto& [k, s] : j.at("series").items()) {
    c.series[k] = SeriesStats{read_array(s.at("mean")), read_array(s.at("stddev"))};
  }
  for (const auto& [k, s] : j.at("steady_state").items()) {
    c.steady[k] = SteadyStats{read_number(s.at("mean")), read_number(s.at("stddev")),
                              s.at("window_begin").get<std::size_t>(),
                              s.at("window_length").get<std::size_t>()};
  }
  c.divergence_messages = j.at("divergence_messages").get<std::vector<std::string>>();
  if (j.contains("analysis")) c.analysis = analysis_from_json(j.at("analysis"));
  return c;
}

}  // namespace

std::string series_key(std::string_view algorithm, std::string_view metric) {
  return std::string(algorithm) + "_" + std::string(metric);
}

const SeriesStats& CaseReport::at(std::string_view algorithm, std::string_view metric) const {
  auto it = series.find(series_key(algorithm, metric));
  if (it == series.end()) {
    throw UsageError("case '" + label + "' has no series '" + series_key(algorithm, metric) + "'");
  }
  return it->second;
}

const SteadyStats& CaseReport::steady_at(std::string_view algorithm,
                                         std::string_view metric) const {
  auto it = steady.find(series_key(algorithm, metric));
  if (it == steady.end()) {
    throw UsageError("case '" + label + "' has no steady-state value '" +
                     series_key(algorithm, metric) + "'");
  }
  return it->second;
}

CaseReport make_case_report(std::string label, const ConfigMap& parameters,
                            const ResolvedExperiment& resolved, const MonteCarloResult& result) {
  const Experiment& ex = resolved.experiment;
  CaseReport c;
  c.label = std::move(label);
  c.parameters = parameters;
  c.seed = result.seed;
  c.runs = result.runs;
  c.completed_runs = result.completed_runs;
  c.diverged_runs = result.diverged_runs;
  c.iterations = ex.trial.iterations;
  c.mean_noise_variance = result.mean_noise_variance;
  c.divergence_messages = result.divergence_messages;
  for (Metric m : result.metrics) c.metrics.emplace_back(metric_name(m));
  for (const auto& f : result.filters) {
    c.algorithms.push_back(f.label);
    for (Metric m : result.metrics) {
      const auto key = series_key(f.label, metric_name(m));
      c.series[key] = f[m];
      c.steady[key] = f.steady_state(m);
    }
  }

  if (!resolved.analysis.enabled || result.completed_runs == 0) return c;
  const FilterConfig* rl1 = nullptr;
  std::size_t rl1_index = 0;
  for (std::size_t i = 0; i < ex.filters.size(); ++i) {
    if (ex.filters[i].params.variant == Variant::RL1) {
      rl1 = &ex.filters[i];
      rl1_index = i;
    }
  }
  if (rl1 == nullptr || result.filters[rl1_index].snapshots.empty()) return c;
  const auto& snaps = result.filters[rl1_index].snapshots.front();
  if (snaps.empty()) return c;

  const Covariance cov = Covariance::identity(ex.channel.n);
  const double mu = rl1->params.mu;
  const double eps = rl1->params.eps;
  try {
    const double alpha = estimate_alpha_prime(snaps, eps);
    const double beta = estimate_beta_prime(snaps, eps, mu, cov);
    const auto pred =
        predict_excess_mse(mu, cov, result.mean_noise_variance, alpha, beta, rl1->params.rho, eps);
    AnalysisBlock a;
    a.iteration = resolved.analysis.iteration;
    a.sigma2_n = result.mean_noise_variance;
    a.eta = pred.eta;
    a.xi_standard = pred.xi_standard;
    a.alpha_prime = pred.alpha_prime;
    a.beta_prime = pred.beta_prime;
    a.beta_bound = pred.beta_bound;
    a.xi_rl1_predicted = pred.xi_rl1;
    a.rho_star = pred.rho_star;
    for (const auto& f : result.filters) {
      for (Metric m : result.metrics) {
        if (m == Metric::Emse) a.xi_empirical[f.label] = f.steady_state(m).mean;
      }
    }
    c.analysis = std::move(a);
  } catch (const StabilityError&) {
    // mu outside the analysed region: no analysis block
  }
  return c;
}

std::string case_csv(const CaseReport& report) {
  std::string out = "iteration";
  std::vector<const std::vector<double>*> columns;
  for (const auto& algo : report.algorithms) {
    for (const auto& metric : report.metrics) {
      out += ',';
      out += series_key(algo, metric);
      columns.push_back(&report.at(algo, metric).mean);
    }
  }
  out += '\n';
  for (std::size_t k = 0; k < report.iterations; ++k) {
    out += std::to_string(k + 1);
    for (const auto* col : columns) {
      out += ',';
      out += k < col->size() ? format_number((*col)[k]) : std::string();
    }
    out += '\n';
  }
  return out;
}

std::string table_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const CaseReport& report, const std::string& path) {
  write_text(path, case_csv(report));
}

void write_table_csv(const ResultTable& table, const std::string& path) {
  write_text(path, table_csv(table));
}

std::string report_to_json(const Report& report) {
  Json j;
  j["schema_version"] = report.schema_version;
  j["tool"] = "sparselms";
  j["preset"] = report.preset;
  j["description"] = report.description;
  j["seed"] = report.seed;
  j["runs"] = report.runs;
  if (report.wall_time_s) j["wall_time_s"] = *report.wall_time_s;
  Json cases = Json::array();
  for (const auto& c : report.cases) cases.push_back(case_to_json(c));
  j["cases"] = cases;
  if (report.table) {
    Json rows = Json::array();
    for (const auto& r : report.table->rows) rows.push_back(number_array(r));
    j["table"] = Json{{"columns", report.table->columns}, {"rows", rows}};
  }
  return j.dump(2) + "\n";
}

Report report_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("report JSON does not parse: ") + e.what());
  }
  try {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw UsageError("unsupported report schema_version " + std::to_string(r.schema_version));
    }
    r.preset = j.at("preset").get<std::string>();
    r.description = j.at("description").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.runs = j.at("runs").get<std::size_t>();
    if (j.contains("wall_time_s")) r.wall_time_s = j.at("wall_time_s").get<double>();
    for (const auto& c : j.at("cases")) r.cases.push_back(case_from_json(c));
    if (j.contains("table")) {
      ResultTable t;
      t.columns = j.at("table").at("columns").get<std::vector<std::string>>();
      for (const auto& row : j.at("table").at("rows")) t.rows.push_back(read_array(row));
      r.table = std::move(t);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("report JSON has an unexpected layout: ") + e.what());
  }
}

void write_json(const Report& report, const std::string& path) {
  write_text(path, report_to_json(report));
}

Report read_json(const std::string& path) { return report_from_json(read_text(path)); }

}  // namespace sparselms
