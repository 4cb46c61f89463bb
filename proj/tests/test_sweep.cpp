#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qag/error.hpp"
#include "qag/sweep.hpp"

using namespace qag;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "qag_test_sweep";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

SweepSpec small_spec() {
  SweepSpec spec;
  spec.source.name = "fixture:small";
  spec.tau_grid = {5};
  spec.loss_grid = {10, 20, 30, 40};
  spec.iterations = 2;
  spec.base_seed = 3;
  return spec;
}

}  // namespace

TEST_CASE("scheme and format names") {
  CHECK(parse_scheme("qag") == Scheme::Qag);
  CHECK(parse_scheme("OPT") == Scheme::Opt);
  CHECK(parse_scheme("Rnf") == Scheme::Rnf);
  CHECK_THROWS_AS(parse_scheme("greedy"), Error);
  CHECK(std::string(to_string(Scheme::Opt)) == "opt");
  CHECK(parse_format("csv") == ResultFormat::Csv);
  CHECK(parse_format("json") == ResultFormat::Json);
  CHECK_THROWS_AS(parse_format("xml"), Error);
}

TEST_CASE("row count and order") {
  const auto r = run_sweep(small_spec());
  REQUIRE(r.rows.size() == 4 * 3);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    CHECK(r.rows[i].tau_max == 5);
    CHECK(r.rows[i].loss_max == small_spec().loss_grid[i / 3]);
    CHECK(r.rows[i].scheme == std::vector<Scheme>{Scheme::Qag, Scheme::Opt, Scheme::Rnf}[i % 3]);
    CHECK(r.rows[i].churn_rate >= 0.0);
    CHECK(r.rows[i].churn_rate <= 1.0);
    CHECK(r.rows[i].wall_time_s == 0.0);
  }
  auto spec = small_spec();
  spec.tau_grid = {1, 2};
  spec.schemes = {Scheme::Rnf};
  const auto two = run_sweep(spec);
  REQUIRE(two.rows.size() == 8);
  CHECK(two.rows[0].tau_max == 1);
  CHECK(two.rows[3].tau_max == 1);
  CHECK(two.rows[4].tau_max == 2);
  CHECK(two.rows[1].loss_max == 20);
}

TEST_CASE("sweep is deterministic and its files are identical") {
  auto spec = small_spec();
  spec.source.name = "random:small";
  spec.iterations = 1;
  const auto a = run_sweep(spec);
  const auto b = run_sweep(spec);
  CHECK(a == b);
  for (auto format : {ResultFormat::Csv, ResultFormat::Json}) {
    emit_results(a, scratch("a.out"), format);
    emit_results(b, scratch("b.out"), format);
    CHECK(slurp(scratch("a.out")) == slurp(scratch("b.out")));
  }
  spec.base_seed = 4;
  CHECK_FALSE(run_sweep(spec) == a);
}

TEST_CASE("timing fills the wall-time column") {
  auto spec = small_spec();
  spec.timing = true;
  spec.schemes = {Scheme::Qag};
  const auto r = run_sweep(spec);
  for (const auto& row : r.rows) CHECK(row.wall_time_s > 0.0);
}

TEST_CASE("emit and parse") {
  SUBCASE("empty result is header only") {
    const auto path = scratch("empty.csv");
    emit_results({}, path, ResultFormat::Csv);
    CHECK(slurp(path) == std::string(kCsvHeader) + "\n");
    CHECK(parse_results(slurp(path), ResultFormat::Csv).rows.empty());
    emit_results({}, scratch("empty.json"), ResultFormat::Json);
    CHECK(parse_results(slurp(scratch("empty.json")), ResultFormat::Json).rows.empty());
  }
  SUBCASE("four rows, five lines, round trip") {
    SweepResult r;
    r.rows = {{Scheme::Qag, 5, 10, 0.1, 0.2, 0.5, 0.0},
              {Scheme::Opt, 5, 20, 208.52951311458, 1e-300, 0.0, 1.25},
              {Scheme::Rnf, 0.3, 30, 1.0 / 3.0, 12345678.9, 1.0, 0.0},
              {Scheme::Qag, 1e9, 40, 0.0, 0.0, 0.25, 3e-7}};
    for (auto format : {ResultFormat::Csv, ResultFormat::Json}) {
      const auto path = scratch(format == ResultFormat::Csv ? "four.csv" : "four.json");
      emit_results(r, path, format);
      const auto text = slurp(path);
      if (format == ResultFormat::Csv) CHECK(count_lines(text) == 5);
      CHECK(parse_results(text, format) == r);
      // Writing twice gives the same file.
      emit_results(r, path, format);
      CHECK(slurp(path) == text);
    }
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(parse_results("nope\n", ResultFormat::Csv), Error);
    CHECK_THROWS_AS(parse_results(std::string(kCsvHeader) + "\nqag,1,2\n", ResultFormat::Csv), Error);
    CHECK_THROWS_AS(parse_results("{", ResultFormat::Json), Error);
  }
  SUBCASE("unwritable path") {
    try {
      emit_results({}, scratch("missing-dir") / "x" / "y.csv", ResultFormat::Csv);
      FAIL("expected an I/O error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Io);
    }
  }
}

TEST_CASE("format_double is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 208.52951311458, 1e-300, 5e-324, 12345678.9, 0.0, -2.5}) {
    const auto s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(5.0) == "5");
}

TEST_CASE("mean and confidence interval") {
  const auto [m, ci] = mean_ci95({1, 2, 3, 4});
  CHECK(m == doctest::Approx(2.5));
  // s = sqrt(5/3)
  CHECK(ci == doctest::Approx(1.96 * std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(mean_ci95({7}).second == 0.0);
  CHECK(mean_ci95({}).first == 0.0);
}

TEST_CASE("confidence interval shrinks with iterations") {
  auto spec = small_spec();
  spec.source.name = "random:small";
  spec.schemes = {Scheme::Opt, Scheme::Rnf};
  spec.tau_grid = {5};
  spec.loss_grid = {40};
  spec.iterations = 25;
  const auto few = run_sweep(spec);
  spec.iterations = 400;
  const auto many = run_sweep(spec);
  for (std::size_t i = 0; i < few.rows.size(); ++i) {
    CAPTURE(i);
    REQUIRE(few.rows[i].ci95_j > 0.0);
    const double ratio = few.rows[i].ci95_j / many.rows[i].ci95_j;
    // 1/sqrt(n) predicts 4; allow for sampling noise in the spread.
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
  }
}

TEST_CASE("invalid specs") {
  auto spec = small_spec();
  spec.iterations = 0;
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec = small_spec();
  spec.tau_grid.clear();
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec = small_spec();
  spec.loss_grid = {-1};
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec = small_spec();
  spec.schemes.clear();
  CHECK_THROWS_AS(run_sweep(spec), Error);
  spec = small_spec();
  spec.source.name = "fixture:nope";
  CHECK_THROWS_AS(run_sweep(spec), Error);
}

TEST_CASE("Opt beyond the oracle budget fails before any work") {
  SweepSpec spec;
  spec.source.name = "fixture:large";
  spec.tau_grid = {5};
  spec.loss_grid = {20};
  spec.iterations = 3;
  spec.schemes = {Scheme::Rnf, Scheme::Qag, Scheme::Opt};
  const auto start = std::chrono::steady_clock::now();
  try {
    run_sweep(spec);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Budget);
  }
  // A single large QAG solve takes seconds; refusing must not.
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 1.0);

  spec.schemes = {Scheme::Rnf};
  CHECK(run_sweep(spec).rows.size() == 1);
}

TEST_CASE("file sources with subsampling") {
  const auto path = scratch("large.json");
  save_scenario(fixture_large_scenario(5), path);
  ScenarioSource src{path.string(), 4, 2};
  const auto a = src.instance(1);
  CHECK(a.applications.size() == 7);
  CHECK(a.configurations.size() == 4);
  CHECK(a.nodes.size() == 2);
  CHECK_NOTHROW(a.validate());
  CHECK(src.instance(1) == a);
  ScenarioSource whole{path.string(), 0, 0};
  CHECK(whole.instance(9) == fixture_large_scenario(5));
  CHECK_THROWS_AS(ScenarioSource{scratch("missing.json").string()}.instance(0), Error);
}

TEST_CASE("QAG against the optimum cell by cell") {
  for (const char* source : {"fixture:small", "random:small"}) {
    SweepSpec spec;
    spec.source.name = source;
    spec.tau_grid = {1, 2, 5, 10};
    spec.loss_grid = {10, 20, 30, 40};
    spec.iterations = 10;
    spec.base_seed = 11;
    spec.schemes = {Scheme::Qag, Scheme::Opt};
    const auto r = run_sweep(spec);
    for (std::size_t i = 0; i < r.rows.size(); i += 2) {
      const auto& q = r.rows[i];
      const auto& o = r.rows[i + 1];
      CAPTURE(source);
      CAPTURE(q.tau_max);
      CAPTURE(q.loss_max);
      // The optimum serves the most applications on every instance.
      CHECK(q.churn_rate >= o.churn_rate - 1e-12);
      // Equal churn in a cell means equal service on every instance there,
      // and then the optimum's energy is a lower bound.
      if (std::abs(q.churn_rate - o.churn_rate) < 1e-12) {
        CHECK(q.mean_energy_j >= o.mean_energy_j * (1 - 1e-9));
      }
    }
  }
}

TEST_CASE("optimum churn falls as targets loosen") {
  SweepSpec spec;
  spec.source.name = "random:small";
  spec.tau_grid = {1, 2, 5, 10};
  spec.loss_grid = {10, 20, 30, 40};
  spec.iterations = 20;
  spec.schemes = {Scheme::Opt};
  const auto r = run_sweep(spec);
  auto at = [&](std::size_t t, std::size_t l) { return r.rows[t * 4 + l].churn_rate; };
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t l = 0; l < 4; ++l) {
      if (t + 1 < 4) CHECK(at(t + 1, l) <= at(t, l));
      if (l + 1 < 4) CHECK(at(t, l + 1) <= at(t, l));
    }
  }
}

TEST_CASE("qubit budget from the environment") {
  ::setenv("QAG_QUBIT_BUDGET", "12", 1);
  CHECK(default_qubit_budget() == 12);
  ::setenv("QAG_QUBIT_BUDGET", "twelve", 1);
  CHECK_THROWS_AS(default_qubit_budget(), Error);
  ::unsetenv("QAG_QUBIT_BUDGET");
  CHECK(default_qubit_budget() == kDefaultQubitBudget);
}
