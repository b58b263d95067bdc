// sparselms: run sparse-LMS experiment presets and write CSV / JSON / SVG.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparselms/config.hpp"
#include "sparselms/errors.hpp"
#include "sparselms/presets.hpp"
#include "sparselms/report.hpp"

namespace fs = std::filesystem;
using namespace sparselms;

namespace {

struct RunArgs {
  std::string preset;
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> iterations;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string format = "both";
  std::vector<std::string> plots;
  bool linear = false;
  bool record_timing = false;
};

int do_run(const RunArgs& a) {
  RunOptions opts;
  opts.overrides = a.sets;
  opts.seed = a.seed;
  opts.runs = a.runs;
  opts.iterations = a.iterations;

  Report report;
  if (!a.preset.empty()) {
    report = run_preset(a.preset, opts);
  } else {
    report = run_config(load_config_file(a.config_file), opts);
  }
  const double seconds = report.wall_time_s.value_or(0.0);
  if (!a.record_timing) report.wall_time_s.reset();

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);
  const std::string stem = report.preset;
  if (a.format == "csv" || a.format == "both") {
    for (const auto& c : report.cases) {
      write_csv(c, (out / (stem + "_" + c.label + ".csv")).string());
    }
    if (report.table) write_table_csv(*report.table, (out / (stem + "_table.csv")).string());
  }
  if (a.format == "json" || a.format == "both") {
    write_json(report, (out / (stem + ".json")).string());
  }
  for (const auto& metric : a.plots) {
    const bool db = !a.linear;
    for (const auto& c : report.cases) {
      render_svg(c, metric, db, (out / (stem + "_" + c.label + "_" + metric + ".svg")).string());
    }
  }

  for (const auto& c : report.cases) {
    if (c.diverged_runs > 0) {
      std::cerr << "warning: case " << c.label << ": " << c.diverged_runs << " of " << c.runs
                << " runs diverged and were excluded\n";
      for (const auto& m : c.divergence_messages) std::cerr << "  " << m << "\n";
    }
  }
  std::fprintf(stderr, "%s: %zu case(s), wall time %.2f s\n", stem.c_str(), report.cases.size(),
               seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-penalty LMS channel estimation experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "run a preset or a config file");
  auto* preset_opt = run->add_option("--preset", run_args.preset, "preset name");
  auto* config_opt =
      run->add_option("--config", run_args.config_file, "config file (key = value lines)")
          ->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  run->add_option("--seed", run_args.seed, "base seed");
  run->add_option("--runs", run_args.runs, "Monte-Carlo runs");
  run->add_option("--iters", run_args.iterations, "iterations per run");
  run->add_option("--set", run_args.sets, "override, key=value (repeatable)");
  run->add_option("--out", run_args.out_dir, "output directory")->required();
  run->add_option("--format", run_args.format, "csv | json | both")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  run->add_option("--plot", run_args.plots, "write an SVG chart of this metric (repeatable)");
  run->add_flag("--linear", run_args.linear, "linear y axis instead of dB");
  run->add_flag("--record-timing", run_args.record_timing, "store wall time in the JSON report");

  std::string show_preset;
  auto* show = app.add_subcommand("show-config", "print the resolved parameters of a preset");
  show->add_option("--preset", show_preset, "preset name")->required();
  std::vector<std::string> show_sets;
  show->add_option("--set", show_sets, "override, key=value (repeatable)");

  auto* list = app.add_subcommand("list-presets", "list preset names");
  auto* keys = app.add_subcommand("list-keys", "list configuration keys with defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (run_args.preset.empty() && run_args.config_file.empty()) {
        std::cerr << "error: run needs --preset or --config\n";
        return 2;
      }
      return do_run(run_args);
    }
    if (show->parsed()) {
      RunOptions opts;
      opts.overrides = show_sets;
      std::cout << format_preset(resolve_preset(show_preset, opts));
      return 0;
    }
    if (list->parsed()) {
      for (const auto& n : preset_names()) {
        std::cout << n << "  " << get_preset(n).description << "\n";
      }
      return 0;
    }
    if (keys->parsed()) {
      for (const auto& k : config_keys()) {
        std::cout << k.key << " = " << k.default_value << "    # " << k.description << "\n";
      }
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
