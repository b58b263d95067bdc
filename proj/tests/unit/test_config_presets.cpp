#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <string>

#include "sparselms/config.hpp"
#include "sparselms/errors.hpp"
#include "sparselms/presets.hpp"

using namespace sparselms;

namespace {

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("overrides and config text") {
  ConfigMap c = default_config();
  apply_override(c, "mu = 0.02");
  CHECK(c.at("mu") == "0.02");
  CHECK_THROWS_AS(apply_override(c, "step_size=0.1"), UsageError);
  try {
    apply_override(c, "bogus=1");
  } catch (const UsageError& e) {
    CHECK(contains(e.what(), "rl1.rho"));
  }
  CHECK_THROWS_AS(apply_override(c, "mu"), UsageError);

  const ConfigMap parsed = parse_config_text("# comment\nchannel.sparsity = 3\n\nfilters = za\n");
  CHECK(parsed.at("channel.sparsity") == "3");
  CHECK(parsed.at("filters") == "za");
  CHECK(parse_config_text(format_config(parsed)) == parsed);
}

TEST_CASE("build_experiment type-checks values") {
  ConfigMap c = default_config();
  c["mu"] = "fast";
  CHECK_THROWS_AS(build_experiment(c), UsageError);
  c = default_config();
  c["filters"] = "standard,nlms";
  CHECK_THROWS_AS(build_experiment(c), UsageError);
  c = default_config();
  c["channel.sparsity"] = "17";
  CHECK_THROWS_AS(build_experiment(c), UsageError);
  c = default_config();
  c["analysis.iteration"] = "5000";
  CHECK_THROWS_AS(build_experiment(c), UsageError);
  c = default_config();
  c["channel.domain"] = "dct";
  c["filters"] = "oracle";
  CHECK_THROWS_AS(build_experiment(c), UsageError);
}

TEST_CASE("build_experiment maps keys onto the harness") {
  ConfigMap c = default_config();
  c["filters"] = "standard,za,rza,rl1,lp,oracle";
  c["za.rho"] = "1e-3";
  c["rza.eps"] = "10";
  c["runs"] = "7";
  const auto r = build_experiment(c);
  const auto& ex = r.experiment;
  REQUIRE(ex.filters.size() == 6);
  CHECK(ex.filters[1].label == "za");
  CHECK(ex.filters[1].params.rho == 1e-3);
  CHECK(ex.filters[2].params.eps == 10.0);
  CHECK(ex.filters[3].params.rho == 2e-4);
  CHECK(ex.filters[3].params.eps == 0.05);
  CHECK(ex.filters[4].params.p == 0.5);
  CHECK(ex.filters[5].params.variant == Variant::Oracle);
  CHECK(ex.runs == 7);
  CHECK(r.analysis.enabled);
  CHECK(r.analysis.iteration == 1000);
}

TEST_CASE("preset names") {
  const auto names = preset_names();
  CHECK(names.size() == 5);
  for (const auto& n : names) CHECK(get_preset(n).name == n);
  try {
    get_preset("example4");
    CHECK(false);
  } catch (const UsageError& e) {
    CHECK(contains(e.what(), "table1_alpha"));
  }
}

TEST_CASE("example1 presets carry the published parameters") {
  for (std::size_t s : {1u, 4u}) {
    const auto p = get_preset("example1_s" + std::to_string(s));
    REQUIRE(p.cases.size() == 2);
    CHECK(p.cases[0].label == "snr10");
    CHECK(p.cases[1].label == "snr20");
    for (const auto& c : p.cases) {
      const auto& m = c.config;
      CHECK(m.at("channel.n") == "16");
      CHECK(m.at("channel.sparsity") == std::to_string(s));
      CHECK(m.at("channel.taps") == "gaussian");
      CHECK(m.at("channel.normalize") == "false");
      CHECK(m.at("noise.mode") == "snr_db");
      CHECK(m.at("filters") == "standard,za,rza,rl1,lp,oracle");
      CHECK(m.at("mu") == "0.05");
      CHECK(m.at("za.rho") == "5e-4");
      CHECK(m.at("rza.rho") == "4e-3");
      CHECK(m.at("rza.eps") == "25");
      CHECK(m.at("rl1.rho") == "2e-4");
      CHECK(m.at("rl1.eps") == "0.05");
      CHECK(m.at("lp.rho") == "2e-4");
      CHECK(m.at("lp.eps") == "0.05");
      CHECK(m.at("lp.p") == "0.5");
      CHECK(m.at("iterations") == "1000");
      CHECK(m.at("runs") == "2000");
    }
    CHECK(p.cases[0].config.at("noise.level") == "10");
    CHECK(p.cases[1].config.at("noise.level") == "20");
  }
}

TEST_CASE("example2 halves only the reweighted penalties at 20 dB") {
  const auto p = get_preset("example2_dct");
  REQUIRE(p.cases.size() == 2);
  const auto& a = p.cases[0].config;
  const auto& b = p.cases[1].config;
  CHECK(a.at("channel.domain") == "dct");
  CHECK(a.at("filters.basis") == "dct");
  CHECK(a.at("channel.sparsity") == "2");
  CHECK(a.at("channel.taps") == "pm1");
  CHECK(a.at("rl1.rho") == "2e-4");
  CHECK(std::stod(b.at("rl1.rho")) == std::stod(a.at("rl1.rho")) / 2);
  CHECK(std::stod(b.at("lp.rho")) == std::stod(a.at("lp.rho")) / 2);
  CHECK(std::stod(b.at("rza.rho")) == std::stod(a.at("rza.rho")) / 2);
  CHECK(b.at("za.rho") == a.at("za.rho"));
  CHECK(b.at("mu") == a.at("mu"));
}

TEST_CASE("example3 and table1 presets") {
  const auto e3 = get_preset("example3_sweep");
  REQUIRE(e3.cases.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& m = e3.cases[i].config;
    CHECK(m.at("channel.sparsity") == std::to_string(2 * (i + 1)));
    CHECK(m.at("noise.mode") == "variance");
    CHECK(m.at("noise.level") == "0.01");
    CHECK(m.at("channel.taps") == "pm1");
    CHECK(m.at("filters") == "standard,rl1");
    CHECK(m.at("rl1.rho") == "2e-4");
    CHECK(m.at("iterations") == "500");
  }
  const auto t1 = get_preset("table1_alpha");
  REQUIRE(t1.cases.size() == 16);
  for (std::size_t i = 0; i < 16; ++i) {
    const auto& m = t1.cases[i].config;
    CHECK(m.at("channel.sparsity") == std::to_string(i + 1));
    CHECK(m.at("rl1.rho") == "5e-4");
    CHECK(m.at("rl1.eps") == "0.05");
    CHECK(m.at("noise.level") == "0.01");
    CHECK(m.at("analysis.iteration") == "250");
    CHECK(m.at("runs") == "5000");
  }
}

TEST_CASE("show-config output lists every case and key") {
  const auto text = format_preset(resolve_preset("example2_dct", {}));
  CHECK(contains(text, "[snr10]"));
  CHECK(contains(text, "[snr20]"));
  CHECK(contains(text, "rl1.rho = 1e-4"));
  CHECK(contains(text, "channel.domain = dct"));
}

TEST_CASE("run options") {
  RunOptions o;
  o.overrides = {"mu=0.02"};
  o.seed = 5;
  o.runs = 3;
  o.iterations = 100;
  const auto p = resolve_preset("table1_alpha", o);
  const auto& m = p.cases[0].config;
  CHECK(m.at("mu") == "0.02");
  CHECK(m.at("seed") == "5");
  CHECK(m.at("runs") == "3");
  CHECK(m.at("iterations") == "100");
  CHECK(m.at("analysis.iteration") == "0");

  o.overrides = {"analysis.iteration=250"};
  CHECK_THROWS_AS(resolve_preset("table1_alpha", o), UsageError);
  o.overrides = {"nope=1"};
  CHECK_THROWS_AS(resolve_preset("example1_s1", o), UsageError);
}

TEST_CASE("example1 with one run and zero iterations gives an empty valid report") {
  RunOptions o;
  o.runs = 1;
  o.iterations = 0;
  const auto r = run_preset("example1_s1", o);
  REQUIRE(r.cases.size() == 2);
  for (const auto& c : r.cases) {
    CHECK(c.iterations == 0);
    CHECK(c.completed_runs == 1);
    CHECK(c.at("standard", "mse").mean.empty());
    CHECK_FALSE(c.analysis.has_value());
  }
}

TEST_CASE("example3 sweep produces both filters for every sparsity") {
  RunOptions o;
  o.runs = 20;
  const auto r = run_preset("example3_sweep", o);
  REQUIRE(r.cases.size() == 4);
  for (const auto& c : r.cases) {
    CHECK(c.at("standard", "emse").mean.size() == 500);
    CHECK(c.at("rl1", "emse").mean.size() == 500);
    REQUIRE(c.analysis.has_value());
    CHECK(c.analysis->iteration == 150);
  }
  REQUIRE(r.table.has_value());
  CHECK(r.table->rows.size() == 4);
  CHECK(r.table->rows[3][0] == 8.0);
}

TEST_CASE("config files") {
  const std::string path = "/tmp/sparselms_test_config.txt";
  std::ofstream(path) << "filters = standard\niterations = 50\nruns = 4\n";
  const auto cfg = load_config_file(path);
  const auto r = run_config(cfg);
  CHECK(r.preset == "custom");
  REQUIRE(r.cases.size() == 1);
  CHECK(r.cases[0].algorithms == std::vector<std::string>{"standard"});
  CHECK_THROWS_AS(load_config_file("/tmp/sparselms_test_no_such_file"), UsageError);
}
