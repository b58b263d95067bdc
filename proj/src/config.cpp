#include "sparselms/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "sparselms/errors.hpp"

namespace sparselms {

namespace {

constexpr ConfigKey kKeys[] = {
    {"label", "", "case label used in file names and reports"},
    {"channel.n", "16", "filter / channel length N"},
    {"channel.sparsity", "1", "number of nonzero taps S in the sparsity domain"},
    {"channel.taps", "pm1", "nonzero tap law: gaussian | pm1"},
    {"channel.domain", "time", "sparsity domain of the channel: time | dct | <basis csv path>"},
    {"channel.normalize", "false", "rescale each drawn channel to unit energy"},
    {"noise.mode", "variance", "variance | snr_db"},
    {"noise.level", "0.01", "noise variance, or SNR in dB when noise.mode = snr_db"},
    {"filters", "standard,rl1", "comma list of: standard, za, rza, rl1, lp, oracle"},
    {"filters.basis", "identity", "penalty basis for za/rza/rl1/lp: identity | dct | <basis csv path>"},
    {"mu", "0.05", "step size shared by all filters"},
    {"za.rho", "5e-4", "rho_ZA"},
    {"rza.rho", "4e-3", "rho_RZA"},
    {"rza.eps", "25", "eps_RZA"},
    {"rl1.rho", "2e-4", "rho_r"},
    {"rl1.eps", "0.05", "eps_r"},
    {"lp.rho", "2e-4", "rho_p"},
    {"lp.eps", "0.05", "eps_p"},
    {"lp.p", "0.5", "p of the lp pseudo-norm, 0 < p < 1"},
    {"iterations", "1000", "iterations per run"},
    {"runs", "2000", "Monte-Carlo runs"},
    {"seed", "1", "base seed (unsigned 64-bit)"},
    {"threads", "1", "worker threads, 0 = all cores"},
    {"metrics", "mse,emse,sqerr", "comma list of: mse, emse, sqerr, alpha, beta"},
    {"steady.fraction", "0.2", "trailing fraction of iterations averaged for steady state"},
    {"analysis.iteration", "0", "iteration k for alpha'/beta' estimates, 0 = last iteration"},
    {"analysis.eps", "0.05", "eps used by alpha/beta metrics of filters other than rl1"},
};

std::string valid_key_list() {
  std::string out;
  for (const auto& k : kKeys) {
    if (!out.empty()) out += ", ";
    out += k.key;
  }
  return out;
}

bool known_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (k.key == key) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw UsageError("config key '" + std::string(key) + "': expected " + std::string(want) +
                   ", got '" + std::string(value) + "'");
}

const std::string& get(const ConfigMap& c, std::string_view key) {
  auto it = c.find(std::string(key));
  if (it == c.end()) throw UsageError("missing config key '" + std::string(key) + "'");
  return it->second;
}

std::uint64_t get_u64(const ConfigMap& c, std::string_view key) {
  const auto& v = get(c, key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

std::size_t get_size(const ConfigMap& c, std::string_view key) {
  return static_cast<std::size_t>(get_u64(c, key));
}

double get_double(const ConfigMap& c, std::string_view key) {
  const auto& v = get(c, key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(out)) bad_value(key, v, "a finite number");
    return out;
  } catch (const std::logic_error&) {
    bad_value(key, v, "a finite number");
  }
}

bool get_bool(const ConfigMap& c, std::string_view key) {
  const auto& v = get(c, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "true or false");
}

std::shared_ptr<const OrthonormalBasis> make_basis(std::string_view key, const std::string& value,
                                                   std::size_t n, bool identity_is_null) {
  if (value == "time" || value == "identity") {
    if (identity_is_null) return nullptr;
    return std::make_shared<const OrthonormalBasis>(OrthonormalBasis::identity(n));
  }
  if (value == "dct") return std::make_shared<const OrthonormalBasis>(dct_matrix(n));
  if (value.empty()) bad_value(key, value, "time, identity, dct or a basis file path");
  auto basis = std::make_shared<const OrthonormalBasis>(load_basis_csv(value));
  if (basis->size() != n) {
    throw UsageError("basis file '" + value + "' is " + std::to_string(basis->size()) + "x" +
                     std::to_string(basis->size()) + " but channel.n = " + std::to_string(n));
  }
  return basis;
}

}  // namespace

std::span<const ConfigKey> config_keys() { return kKeys; }

ConfigMap default_config() {
  ConfigMap out;
  for (const auto& k : kKeys) out.emplace(std::string(k.key), std::string(k.default_value));
  return out;
}

void set_config_value(ConfigMap& config, std::string_view key, std::string_view value) {
  if (!known_key(key)) {
    throw UsageError("unknown config key '" + std::string(key) + "'; valid keys: " +
                     valid_key_list());
  }
  config[std::string(key)] = trim(value);
}

void apply_override(ConfigMap& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw UsageError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  set_config_value(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

ConfigMap parse_config_text(std::string_view text, ConfigMap base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto stripped = trim(line);
    if (stripped.empty()) continue;
    try {
      apply_override(base, stripped);
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ConfigMap load_config_file(const std::string& path, ConfigMap base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str(), std::move(base));
  } catch (const UsageError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string format_config(const ConfigMap& config) {
  std::string out;
  for (const auto& k : kKeys) {
    auto it = config.find(std::string(k.key));
    if (it == config.end()) continue;
    out += std::string(k.key) + " = " + it->second + "\n";
  }
  return out;
}

ResolvedExperiment build_experiment(const ConfigMap& config) {
  for (const auto& [key, value] : config) {
    if (!known_key(key)) {
      throw UsageError("unknown config key '" + key + "'; valid keys: " + valid_key_list());
    }
  }
  ResolvedExperiment out;
  Experiment& ex = out.experiment;

  ex.channel.n = get_size(config, "channel.n");
  if (ex.channel.n == 0) bad_value("channel.n", get(config, "channel.n"), "a positive integer");
  ex.channel.sparsity = get_size(config, "channel.sparsity");
  if (ex.channel.sparsity < 1 || ex.channel.sparsity > ex.channel.n) {
    bad_value("channel.sparsity", get(config, "channel.sparsity"), "an integer in [1, channel.n]");
  }
  const auto& taps = get(config, "channel.taps");
  if (taps == "gaussian") {
    ex.channel.tap_law = TapLaw::GaussianUnit;
  } else if (taps == "pm1") {
    ex.channel.tap_law = TapLaw::PlusMinusOne;
  } else {
    bad_value("channel.taps", taps, "gaussian or pm1");
  }
  ex.channel.domain = make_basis("channel.domain", get(config, "channel.domain"), ex.channel.n, true);
  ex.channel.normalize = get_bool(config, "channel.normalize");

  const auto& mode = get(config, "noise.mode");
  const double level = get_double(config, "noise.level");
  if (mode == "variance") {
    if (level < 0.0) bad_value("noise.level", get(config, "noise.level"), "a variance >= 0");
    ex.noise = NoiseSpec::fixed(level);
  } else if (mode == "snr_db") {
    ex.noise = NoiseSpec::snr_db(level);
  } else {
    bad_value("noise.mode", mode, "variance or snr_db");
  }

  const double mu = get_double(config, "mu");
  const auto basis = make_basis("filters.basis", get(config, "filters.basis"), ex.channel.n, true);
  const auto names = split_list(get(config, "filters"));
  if (names.empty()) bad_value("filters", get(config, "filters"), "at least one filter");
  std::set<std::string> seen;
  for (const auto& name : names) {
    const auto variant = parse_variant(name);
    if (!variant) bad_value("filters", name, "one of standard, za, rza, rl1, lp, oracle");
    if (!seen.insert(name).second) bad_value("filters", name, "each filter at most once");
    FilterConfig fc;
    fc.label = name;
    fc.params.variant = *variant;
    fc.params.mu = mu;
    switch (*variant) {
      case Variant::Standard:
      case Variant::Oracle: break;
      case Variant::ZA: fc.params.rho = get_double(config, "za.rho"); break;
      case Variant::RZA:
        fc.params.rho = get_double(config, "rza.rho");
        fc.params.eps = get_double(config, "rza.eps");
        break;
      case Variant::RL1:
        fc.params.rho = get_double(config, "rl1.rho");
        fc.params.eps = get_double(config, "rl1.eps");
        break;
      case Variant::LP:
        fc.params.rho = get_double(config, "lp.rho");
        fc.params.eps = get_double(config, "lp.eps");
        fc.params.p = get_double(config, "lp.p");
        break;
    }
    if (*variant == Variant::Oracle) {
      if (ex.channel.domain) {
        throw UsageError("oracle filter needs a time-domain channel (channel.domain = time)");
      }
    } else if (*variant != Variant::Standard) {
      fc.basis = basis;
    }
    try {
      // Oracle support is filled per run; validate the rest now.
      fc.params.validate(ex.channel.n);
    } catch (const ContractViolation& e) {
      throw UsageError("filter '" + name + "': " + e.what());
    }
    ex.filters.push_back(std::move(fc));
  }

  ex.trial.iterations = get_size(config, "iterations");
  ex.runs = get_size(config, "runs");
  if (ex.runs == 0) bad_value("runs", get(config, "runs"), "a positive integer");
  ex.seed = get_u64(config, "seed");
  ex.threads = get_size(config, "threads");
  ex.steady_fraction = get_double(config, "steady.fraction");
  if (!(ex.steady_fraction > 0.0 && ex.steady_fraction <= 1.0)) {
    bad_value("steady.fraction", get(config, "steady.fraction"), "a number in (0, 1]");
  }
  ex.trial.analysis_eps = get_double(config, "analysis.eps");
  if (!(ex.trial.analysis_eps > 0.0)) {
    bad_value("analysis.eps", get(config, "analysis.eps"), "a number > 0");
  }

  ex.trial.metrics.clear();
  for (const auto& m : split_list(get(config, "metrics"))) {
    const auto metric = parse_metric(m);
    if (!metric) bad_value("metrics", m, "one of mse, emse, sqerr, alpha, beta");
    for (Metric existing : ex.trial.metrics) {
      if (existing == *metric) bad_value("metrics", m, "each metric at most once");
    }
    ex.trial.metrics.push_back(*metric);
  }
  if (ex.trial.metrics.empty()) bad_value("metrics", get(config, "metrics"), "at least one metric");

  const std::size_t k = get_size(config, "analysis.iteration");
  if (k > ex.trial.iterations) {
    throw UsageError("analysis.iteration = " + std::to_string(k) + " exceeds iterations = " +
                     std::to_string(ex.trial.iterations));
  }
  const bool has_rl1 = seen.count("rl1") != 0;
  if (has_rl1 && ex.trial.iterations > 0) {
    out.analysis.enabled = true;
    out.analysis.iteration = k == 0 ? ex.trial.iterations : k;
    ex.trial.snapshot_at = {out.analysis.iteration};
  }
  return out;
}

}  // namespace sparselms
