#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "sparselms/errors.hpp"
#include "sparselms/presets.hpp"
#include "sparselms/report.hpp"

using namespace sparselms;

namespace {

CaseReport sample_case(std::size_t iterations) {
  CaseReport c;
  c.label = "demo";
  c.parameters = {{"mu", "0.05"}, {"runs", "2"}};
  c.seed = 3;
  c.runs = 2;
  c.completed_runs = 2;
  c.iterations = iterations;
  c.mean_noise_variance = 0.01;
  c.algorithms = {"standard", "rl1"};
  c.metrics = {"mse", "emse"};
  for (const auto& a : c.algorithms) {
    for (const auto& m : c.metrics) {
      SeriesStats s;
      for (std::size_t k = 0; k < iterations; ++k) {
        s.mean.push_back(1.0 / (1.0 + k) + (a == "rl1" ? 1e-3 : 0.0) + 1.0 / 3.0 * 1e-5);
        s.stddev.push_back(0.1 / (1.0 + k));
      }
      c.series[series_key(a, m)] = s;
      c.steady[series_key(a, m)] = {0.1, 0.01, 1, iterations};
    }
  }
  return c;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Checks that every element opened is closed in order; comments and the
// XML declaration are skipped.
bool tags_balanced(const std::string& svg) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = svg.find('<', pos)) != std::string::npos) {
    const auto end = svg.find('>', pos);
    if (end == std::string::npos) return false;
    const std::string tag = svg.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
    } else if (tag.back() != '/') {
      stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
    }
  }
  return stack.empty();
}

bool coordinates_finite(const std::string& svg) {
  return svg.find("nan") == std::string::npos && svg.find("inf") == std::string::npos;
}

}  // namespace

TEST_CASE("CSV layout") {
  const auto c = sample_case(5);
  const auto rows = lines(case_csv(c));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == "iteration,standard_mse,standard_emse,rl1_mse,rl1_emse");
  for (const auto& r : rows) {
    CHECK(static_cast<std::size_t>(std::count(r.begin(), r.end(), ',')) + 1 ==
          1 + c.algorithms.size() * c.metrics.size());
  }
  CHECK(rows[1].rfind("1,", 0) == 0);
  CHECK(rows[5].rfind("5,", 0) == 0);
}

TEST_CASE("CSV numbers round-trip at 17 significant digits") {
  const auto c = sample_case(4);
  const auto rows = lines(case_csv(c));
  std::istringstream cell(rows[3]);
  std::string it, first;
  std::getline(cell, it, ',');
  std::getline(cell, first, ',');
  CHECK(std::strtod(first.c_str(), nullptr) == c.at("standard", "mse").mean[2]);
}

TEST_CASE("empty series give a header-only CSV") {
  const auto rows = lines(case_csv(sample_case(0)));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].rfind("iteration,", 0) == 0);
}

TEST_CASE("table CSV") {
  ResultTable t{{"sparsity", "alpha_prime"}, {{1, 3.25}, {2, 2.98}}};
  const auto rows = lines(table_csv(t));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "sparsity,alpha_prime");
  CHECK(rows[1] == "1,3.25");
}

TEST_CASE("JSON round-trip") {
  Report r;
  r.preset = "demo";
  r.description = "a \"quoted\" description";
  r.seed = 18446744073709551615ULL;
  r.runs = 2;
  r.cases = {sample_case(6), sample_case(0)};
  r.cases[1].label = "empty";
  AnalysisBlock a;
  a.iteration = 6;
  a.sigma2_n = 0.01;
  a.eta = 0.8421052631578947;
  a.xi_standard = 7.2727e-3;
  a.alpha_prime = 3.2;
  a.beta_prime = 5110.4;
  a.beta_bound = 6736.842105263157;
  a.xi_rl1_predicted = 1.1e-3;
  a.rho_star = 6e-4;
  a.xi_empirical = {{"rl1", 1e-3}, {"standard", 7e-3}};
  r.cases[0].analysis = a;
  r.table = ResultTable{{"sparsity", "rho_star"}, {{1, 6e-4}, {2, 5e-4}}};

  const auto text = report_to_json(r);
  CHECK(report_from_json(text) == r);
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);
  CHECK(text.find("wall_time_s") == std::string::npos);

  r.wall_time_s = 1.5;
  CHECK(report_from_json(report_to_json(r)) == r);

  const std::string path = "/tmp/sparselms_test_report.json";
  write_json(r, path);
  CHECK(read_json(path) == r);
}

TEST_CASE("JSON maps NaN to null") {
  Report r;
  r.preset = "nan";
  r.table = ResultTable{{"x"}, {{std::numeric_limits<double>::quiet_NaN()}}};
  const auto text = report_to_json(r);
  CHECK(text.find("null") != std::string::npos);
  CHECK(std::isnan(report_from_json(text).table->rows[0][0]));
}

TEST_CASE("bad JSON and bad paths") {
  CHECK_THROWS_AS(report_from_json("{"), UsageError);
  CHECK_THROWS_AS(report_from_json("{\"schema_version\": 99}"), UsageError);
  try {
    write_csv(sample_case(2), "/nonexistent_dir/x.csv");
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent_dir/x.csv") != std::string::npos);
  }
}

TEST_CASE("to_db and ticks") {
  CHECK(to_db(0.01) == doctest::Approx(-20.0));
  const auto t = nice_ticks(0.0, 1000.0);
  REQUIRE(!t.empty());
  CHECK(t.front() <= 0.0);
  CHECK(t.back() >= 1000.0);
  CHECK(t.size() >= 4);
  CHECK(t.size() <= 12);
  const auto neg = nice_ticks(-37.2, -3.1);
  CHECK(neg.front() <= -37.2);
  CHECK(neg.back() >= -3.1);
  CHECK_FALSE(nice_ticks(5.0, 5.0).empty());
}

TEST_CASE("SVG with two algorithms") {
  const auto svg = render_svg_string(sample_case(50), "mse", true);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(count(svg, "<svg") == 1);
  CHECK(svg.find(">standard</text>") != std::string::npos);
  CHECK(svg.find(">rl1</text>") != std::string::npos);
  CHECK(tags_balanced(svg));
  CHECK(coordinates_finite(svg));
  CHECK_THROWS_AS(render_svg_string(sample_case(5), "beta", true), UsageError);
}

TEST_CASE("single-point series draws one marker") {
  const std::vector<LineSeries> one{{"only", {1.0}, {0.5}}};
  const auto svg = render_line_chart(one, {});
  CHECK(count(svg, "<circle") == 1);
  CHECK(count(svg, "<polyline") == 0);
  CHECK(tags_balanced(svg));
  CHECK(coordinates_finite(svg));
}

TEST_CASE("dB axis labels 0.01 as -20") {
  const std::vector<LineSeries> s{{"a", {1, 2, 3}, {1.0, 0.1, 0.01}}};
  ChartOptions o;
  o.db_scale = true;
  const auto svg = render_line_chart(s, o);
  CHECK(svg.find(">-20</text>") != std::string::npos);
  CHECK(svg.find(">0</text>") != std::string::npos);
}

TEST_CASE("names are escaped") {
  const std::vector<LineSeries> s{{"a<b & \"c\"", {1, 2}, {1, 2}}};
  const auto svg = render_line_chart(s, {});
  CHECK(svg.find("a&lt;b &amp; &quot;c&quot;") != std::string::npos);
  CHECK(tags_balanced(svg));
}

TEST_CASE("empty chart is still a valid document") {
  const auto svg = render_line_chart({}, {});
  CHECK(tags_balanced(svg));
  CHECK(coordinates_finite(svg));
}

TEST_CASE("same seed gives byte-identical CSV and JSON") {
  RunOptions o;
  o.runs = 30;
  o.iterations = 80;
  const auto a = run_preset("example2_dct", o);
  const auto b = run_preset("example2_dct", o);
  Report ra = a, rb = b;
  ra.wall_time_s.reset();
  rb.wall_time_s.reset();
  CHECK(report_to_json(ra) == report_to_json(rb));
  CHECK(case_csv(a.cases[1]) == case_csv(b.cases[1]));

  o.seed = 2;
  Report rc = run_preset("example2_dct", o);
  rc.wall_time_s.reset();
  CHECK(report_to_json(rc) != report_to_json(ra));
  CHECK(rc.seed == 2);
}

TEST_CASE("analysis block of a real run") {
  RunOptions o;
  o.runs = 40;
  const auto r = run_preset("table1_alpha", o);
  REQUIRE(r.cases[0].analysis.has_value());
  const auto& a = *r.cases[0].analysis;
  CHECK(a.iteration == 250);
  CHECK(a.beta_prime >= 0.0);
  CHECK(a.beta_prime <= a.beta_bound);
  CHECK(a.eta == doctest::Approx(16 * 0.05 / 0.95));
  CHECK(a.sigma2_n == doctest::Approx(0.01));
  CHECK(a.xi_empirical.count("rl1") == 1);
}
