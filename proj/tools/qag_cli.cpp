// Command-line front end over the C interface.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qag/qag.h"

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::optional<std::size_t> layers;
  std::optional<std::uint64_t> shots;
  std::optional<std::size_t> qaoa_iters;
  std::optional<std::size_t> qubit_budget;
  std::optional<double> oracle_budget;
  std::string format = "csv";
};

// Thrown after a failed C call; main turns it into a diagnostic and exit 1.
struct CallFailed {
  std::string message;
};

void check(qag_status status, const char* what) {
  if (status != QAG_OK) {
    throw CallFailed{std::string(what) + ": " + qag_status_name(status) + ": " + qag_last_error()};
  }
}

qag_options options_from(const Globals& g) {
  qag_options o{};
  check(qag_options_default(&o), "default options");
  if (g.layers) o.layers = *g.layers;
  if (g.shots) o.shots = *g.shots;
  if (g.qaoa_iters) o.max_iters = *g.qaoa_iters;
  if (g.qubit_budget) o.qubit_budget = *g.qubit_budget;
  if (g.oracle_budget) o.oracle_budget = *g.oracle_budget;
  return o;
}

qag_format format_from(const Globals& g) {
  qag_format f{};
  check(qag_parse_format(g.format.c_str(), &f), "--format");
  return f;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CallFailed{"cannot open '" + path + "' for writing"};
  out << text;
  if (!out.flush()) throw CallFailed{"failed writing '" + path + "'"};
}

struct Owned {
  char* text = nullptr;
  ~Owned() { qag_string_free(text); }
};

struct SolveArgs {
  std::string scenario = "fixture:small";
  std::string scheme = "qag";
  std::optional<double> tau_max;
  std::optional<double> loss_max;
  std::string out;
};

int run_solve(const Globals& g, const SolveArgs& a, const char* forced_scheme) {
  qag_scheme scheme{};
  check(qag_parse_scheme(forced_scheme ? forced_scheme : a.scheme.c_str(), &scheme), "--scheme");
  const auto options = options_from(g);
  const auto format = format_from(g);

  qag_scenario* scenario = nullptr;
  check(qag_scenario_open(a.scenario.c_str(), g.seed, &scenario), "--scenario");
  std::unique_ptr<qag_scenario, decltype(&qag_scenario_free)> scenario_guard(scenario,
                                                                             qag_scenario_free);
  if (a.tau_max.has_value() != a.loss_max.has_value()) {
    throw CallFailed{"--tau-max and --loss-max must be given together"};
  }
  if (a.tau_max) check(qag_scenario_set_targets(scenario, *a.tau_max, *a.loss_max), "targets");

  qag_result* result = nullptr;
  check(qag_solve(scenario, scheme, &options, g.seed, &result), "solve");
  std::unique_ptr<qag_result, decltype(&qag_result_free)> result_guard(result, qag_result_free);

  Owned text;
  check(qag_result_format(result, scenario, format, &text.text), "format");
  write_text(text.text, a.out);
  return 0;
}

struct SweepArgs {
  std::string scenario = "fixture:small";
  std::vector<std::string> schemes{"qag", "opt", "rnf"};
  std::vector<double> tau_grid;
  std::vector<double> loss_grid;
  std::size_t iterations = 200;
  std::size_t sample_configs = 0;
  std::size_t sample_nodes = 0;
  bool timing = false;
  std::string out;
};

int run_sweep(const Globals& g, const SweepArgs& a) {
  const auto options = options_from(g);
  const auto format = format_from(g);
  std::vector<qag_scheme> schemes;
  for (const auto& name : a.schemes) {
    qag_scheme s{};
    check(qag_parse_scheme(name.c_str(), &s), "--schemes");
    schemes.push_back(s);
  }

  qag_sweep* sweep = nullptr;
  check(qag_sweep_create(&sweep), "sweep");
  std::unique_ptr<qag_sweep, decltype(&qag_sweep_free)> guard(sweep, qag_sweep_free);
  check(qag_sweep_set_source(sweep, a.scenario.c_str(), a.sample_configs, a.sample_nodes),
        "--scenario");
  check(qag_sweep_set_schemes(sweep, schemes.data(), schemes.size()), "--schemes");
  check(qag_sweep_set_grids(sweep, a.tau_grid.data(), a.tau_grid.size(), a.loss_grid.data(),
                            a.loss_grid.size()),
        "grids");
  check(qag_sweep_set_iterations(sweep, a.iterations, g.seed), "--iterations");
  check(qag_sweep_set_options(sweep, &options), "options");
  check(qag_sweep_set_timing(sweep, a.timing ? 1 : 0), "--timing");
  check(qag_sweep_run(sweep), "sweep");

  if (a.out.empty() || a.out == "-") {
    Owned text;
    check(qag_sweep_format(sweep, format, &text.text), "format");
    std::cout << text.text;
  } else {
    check(qag_sweep_write(sweep, a.out.c_str(), format), "--out");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware configuration and placement of network-modeling applications"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--layers", g.layers, "QAOA layers p");
  app.add_option("--shots", g.shots, "Measurement shots");
  app.add_option("--qaoa-iters", g.qaoa_iters, "Parameter optimizer iterations");
  app.add_option("--qubit-budget", g.qubit_budget,
                 "Largest cut problem simulated (default 20, or QAG_QUBIT_BUDGET)");
  app.add_option("--oracle-budget", g.oracle_budget, "Largest search space for the optimum");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "Solve one scenario with one scheme");
  solve->add_option("--scenario", solve_args.scenario,
                    "fixture:small, fixture:large, random:small or a scenario file")
      ->capture_default_str();
  solve->add_option("--scheme", solve_args.scheme, "qag, opt or rnf")
      ->check(CLI::IsMember({"qag", "opt", "rnf"}))
      ->capture_default_str();
  solve->add_option("--tau-max", solve_args.tau_max, "Latency target for every app, s");
  solve->add_option("--loss-max", solve_args.loss_max, "Loss target for every app, MAPE %");
  solve->add_option("--out", solve_args.out, "Output file (default stdout)");

  SolveArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum for one scenario");
  oracle->add_option("--scenario", oracle_args.scenario,
                     "fixture:small, random:small or a scenario file")
      ->capture_default_str();
  oracle->add_option("--tau-max", oracle_args.tau_max, "Latency target for every app, s");
  oracle->add_option("--loss-max", oracle_args.loss_max, "Loss target for every app, MAPE %");
  oracle->add_option("--out", oracle_args.out, "Output file (default stdout)");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Sweep latency and loss targets over seeded instances");
  sweep->add_option("--scenario", sweep_args.scenario,
                    "fixture:small, fixture:large, random:small or a scenario file")
      ->capture_default_str();
  sweep->add_option("--schemes", sweep_args.schemes, "Comma-separated subset of qag,opt,rnf")
      ->delimiter(',')
      ->check(CLI::IsMember({"qag", "opt", "rnf"}));
  sweep->add_option("--tau-grid", sweep_args.tau_grid, "Latency targets, s (comma-separated)")
      ->delimiter(',')
      ->required();
  sweep->add_option("--loss-grid", sweep_args.loss_grid, "Loss targets, MAPE % (comma-separated)")
      ->delimiter(',')
      ->required();
  sweep->add_option("--iterations", sweep_args.iterations, "Instances per grid cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_option("--sample-configs", sweep_args.sample_configs,
                    "Configurations drawn per instance from a scenario file (0 = all)");
  sweep->add_option("--sample-nodes", sweep_args.sample_nodes,
                    "Nodes drawn per instance from a scenario file (0 = all)");
  sweep->add_flag("--timing", sweep_args.timing, "Record wall time per solve");
  sweep->add_option("--out", sweep_args.out, "Output file (default stdout)");

  std::string fixtures_dir;
  auto* fixtures = app.add_subcommand("fixtures", "Write the fixture scenarios to a directory");
  fixtures->add_option("--out", fixtures_dir, "Target directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(g, solve_args, nullptr);
    if (*oracle) return run_solve(g, oracle_args, "opt");
    if (*sweep) return run_sweep(g, sweep_args);
    if (*fixtures) {
      check(qag_write_fixtures(fixtures_dir.c_str(), g.seed), "fixtures");
      std::cout << "wrote " << fixtures_dir << "/small.json and " << fixtures_dir
                << "/large.json\n";
      return 0;
    }
  } catch (const CallFailed& e) {
    std::cerr << "error: " << e.message << "\n";
    return 1;
  }
  return 1;
}
