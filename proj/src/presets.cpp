#include "sparselms/presets.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "sparselms/errors.hpp"

namespace sparselms {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Preset example1(std::size_t sparsity) {
  Preset p;
  p.name = "example1_s" + std::to_string(sparsity);
  p.description = "time-sparse Gaussian channel, S = " + std::to_string(sparsity) +
                  ", six filters at 10 and 20 dB SNR";
  for (int snr : {10, 20}) {
    ConfigMap c = default_config();
    c["label"] = "snr" + std::to_string(snr);
    c["channel.sparsity"] = std::to_string(sparsity);
    c["channel.taps"] = "gaussian";
    c["noise.mode"] = "snr_db";
    c["noise.level"] = std::to_string(snr);
    c["filters"] = "standard,za,rza,rl1,lp,oracle";
    c["iterations"] = "1000";
    c["runs"] = "2000";
    p.cases.push_back({c["label"], c});
  }
  return p;
}

Preset example2() {
  Preset p;
  p.name = "example2_dct";
  p.description = "DCT-sparse channel, S = 2, +/-1 coefficients, penalties applied in the DCT domain";
  for (int snr : {10, 20}) {
    ConfigMap c = default_config();
    c["label"] = "snr" + std::to_string(snr);
    c["channel.sparsity"] = "2";
    c["channel.taps"] = "pm1";
    c["channel.domain"] = "dct";
    c["filters.basis"] = "dct";
    c["noise.mode"] = "snr_db";
    c["noise.level"] = std::to_string(snr);
    c["filters"] = "standard,za,rza,rl1,lp";
    c["iterations"] = "1000";
    c["runs"] = "2000";
    if (snr == 20) {
      c["rl1.rho"] = "1e-4";
      c["lp.rho"] = "1e-4";
      c["rza.rho"] = "2e-3";
    }
    p.cases.push_back({c["label"], c});
  }
  return p;
}

Preset example3() {
  Preset p;
  p.name = "example3_sweep";
  p.description = "excess MSE of standard and reweighted-l1 LMS for S = 2, 4, 6, 8";
  p.table = PresetTable::SparsitySweep;
  for (int s : {2, 4, 6, 8}) {
    ConfigMap c = default_config();
    c["label"] = "s" + std::to_string(s);
    c["channel.sparsity"] = std::to_string(s);
    c["channel.taps"] = "pm1";
    c["noise.mode"] = "variance";
    c["noise.level"] = "0.01";
    c["filters"] = "standard,rl1";
    c["rl1.rho"] = "2e-4";
    c["iterations"] = "500";
    c["runs"] = "2000";
    c["analysis.iteration"] = "150";
    p.cases.push_back({c["label"], c});
  }
  return p;
}

Preset table1() {
  Preset p;
  p.name = "table1_alpha";
  p.description = "alpha' and beta' of reweighted-l1 LMS at k = 250 for S = 1..16";
  p.table = PresetTable::AlphaTable;
  for (int s = 1; s <= 16; ++s) {
    ConfigMap c = default_config();
    c["label"] = "s" + std::to_string(s);
    c["channel.sparsity"] = std::to_string(s);
    c["channel.taps"] = "pm1";
    c["channel.normalize"] = "true";
    c["noise.mode"] = "variance";
    c["noise.level"] = "0.01";
    c["filters"] = "rl1";
    c["rl1.rho"] = "5e-4";
    c["rl1.eps"] = "0.05";
    c["iterations"] = "250";
    c["runs"] = "5000";
    c["analysis.iteration"] = "250";
    p.cases.push_back({c["label"], c});
  }
  return p;
}

double steady_or_nan(const CaseReport& c, std::string_view algo, std::string_view metric) {
  auto it = c.steady.find(series_key(algo, metric));
  return it == c.steady.end() ? kNaN : it->second.mean;
}

ResultTable build_table(const Preset& preset, const std::vector<CaseReport>& cases) {
  ResultTable t;
  if (preset.table == PresetTable::SparsitySweep) {
    t.columns = {"sparsity", "emse_standard", "emse_rl1", "xi_standard", "alpha_prime",
                 "beta_prime", "xi_rl1_predicted"};
  } else {
    t.columns = {"sparsity", "alpha_prime", "beta_prime", "beta_bound", "rho_star",
                 "xi_rl1_predicted"};
  }
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const CaseReport& c = cases[i];
    const double s = std::stod(preset.cases[i].config.at("channel.sparsity"));
    const auto& a = c.analysis;
    if (preset.table == PresetTable::SparsitySweep) {
      t.rows.push_back({s, steady_or_nan(c, "standard", "emse"), steady_or_nan(c, "rl1", "emse"),
                        a ? a->xi_standard : kNaN, a ? a->alpha_prime : kNaN,
                        a ? a->beta_prime : kNaN, a ? a->xi_rl1_predicted : kNaN});
    } else {
      t.rows.push_back({s, a ? a->alpha_prime : kNaN, a ? a->beta_prime : kNaN,
                        a ? a->beta_bound : kNaN, a && a->rho_star ? *a->rho_star : kNaN,
                        a ? a->xi_rl1_predicted : kNaN});
    }
  }
  return t;
}

bool overrides_key(const std::vector<std::string>& overrides, std::string_view key) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    std::string k = o.substr(0, eq);
    while (!k.empty() && (k.back() == ' ' || k.back() == '\t')) k.pop_back();
    while (!k.empty() && (k.front() == ' ' || k.front() == '\t')) k.erase(k.begin());
    if (k == key) return true;
  }
  return false;
}

void apply_options(ConfigMap& config, const RunOptions& options) {
  for (const auto& o : options.overrides) apply_override(config, o);
  if (options.seed) config["seed"] = std::to_string(*options.seed);
  if (options.runs) config["runs"] = std::to_string(*options.runs);
  if (options.iterations) {
    config["iterations"] = std::to_string(*options.iterations);
    const auto k = std::stoull(config["analysis.iteration"]);
    if (k > *options.iterations && !overrides_key(options.overrides, "analysis.iteration")) {
      config["analysis.iteration"] = "0";
    }
  }
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"example1_s1", "example1_s4", "example2_dct", "example3_sweep", "table1_alpha"};
}

Preset get_preset(std::string_view name) {
  if (name == "example1_s1") return example1(1);
  if (name == "example1_s4") return example1(4);
  if (name == "example2_dct") return example2();
  if (name == "example3_sweep") return example3();
  if (name == "table1_alpha") return table1();
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw UsageError("unknown preset '" + std::string(name) + "'; known presets: " + known);
}

Preset resolve_preset(std::string_view name, const RunOptions& options) {
  Preset p = get_preset(name);
  for (auto& c : p.cases) {
    apply_options(c.config, options);
    // label stays the case name so file names stay predictable
    c.config["label"] = c.label;
    build_experiment(c.config);  // type-check before anything runs
  }
  return p;
}

std::string format_preset(const Preset& preset) {
  std::string out = "# " + preset.name + ": " + preset.description + "\n";
  for (const auto& c : preset.cases) {
    out += "\n[" + c.label + "]\n";
    out += format_config(c.config);
  }
  return out;
}

Report run_resolved(const Preset& preset) {
  const auto t0 = std::chrono::steady_clock::now();
  Report r;
  r.preset = preset.name;
  r.description = preset.description;
  if (!preset.cases.empty()) {
    r.seed = std::stoull(preset.cases.front().config.at("seed"));
    r.runs = std::stoull(preset.cases.front().config.at("runs"));
  }
  for (const auto& c : preset.cases) {
    const ResolvedExperiment resolved = build_experiment(c.config);
    const MonteCarloResult result = run_monte_carlo(resolved.experiment);
    r.cases.push_back(make_case_report(c.label, c.config, resolved, result));
  }
  if (preset.table != PresetTable::None) r.table = build_table(preset, r.cases);
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Report run_preset(std::string_view name, const RunOptions& options) {
  return run_resolved(resolve_preset(name, options));
}

Report run_config(const ConfigMap& config, const RunOptions& options) {
  Preset p;
  p.name = "custom";
  p.description = "user configuration";
  ConfigMap c = config;
  apply_options(c, options);
  if (c["label"].empty()) c["label"] = "case";
  build_experiment(c);
  p.cases.push_back({c["label"], c});
  return run_resolved(p);
}

}  // namespace sparselms
