#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "qag/baselines.hpp"
#include "qag/qaoa.hpp"
#include "qag/scenario.hpp"

namespace qag {

enum class Scheme { Qag, Opt, Rnf };

const char* to_string(Scheme scheme);
Scheme parse_scheme(std::string_view name);

// Qubit budget from QAG_QUBIT_BUDGET, or kDefaultQubitBudget when unset.
std::size_t default_qubit_budget();

// Where the per-iteration instances come from:
//   fixture:small  the worked example, identical every iteration
//   fixture:large  the large fixture regenerated with the iteration seed
//   random:small   a fresh random two-application instance per iteration
//   anything else  a scenario file; with sample_configs / sample_nodes set,
//                  each iteration draws that many configurations / nodes
struct ScenarioSource {
  std::string name = "fixture:small";
  std::size_t sample_configs = 0;
  std::size_t sample_nodes = 0;

  // Instance used by `iteration`; targets are left as the source has them.
  Scenario instance(std::uint64_t iteration_seed) const;
};

struct SweepSpec {
  ScenarioSource source;
  std::vector<Scheme> schemes{Scheme::Qag, Scheme::Opt, Scheme::Rnf};
  std::vector<double> tau_grid;   // s
  std::vector<double> loss_grid;  // MAPE %
  std::size_t iterations = 200;
  std::uint64_t base_seed = 0;
  QaoaConfig qaoa;
  double oracle_budget = kDefaultOracleBudget;
  // Measure wall time per solve. Off by default so result files only depend
  // on the inputs.
  bool timing = false;

  void validate() const;
};

struct SweepRow {
  Scheme scheme = Scheme::Qag;
  double tau_max = 0.0;
  double loss_max = 0.0;
  double mean_energy_j = 0.0;
  double ci95_j = 0.0;
  double churn_rate = 0.0;
  double wall_time_s = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
  std::vector<SweepRow> rows;

  bool operator==(const SweepResult&) const = default;
};

// Seed of the instance and solver streams for one iteration. Every grid cell
// sees the same instances, so differences between cells come from the
// targets alone.
std::uint64_t iteration_seed(std::uint64_t base_seed, std::size_t iteration);

// One row per (tau, loss, scheme), tau outermost and schemes innermost.
// Throws Error(Budget) before solving anything when Opt is requested for a
// source beyond the oracle budget.
SweepResult run_sweep(const SweepSpec& spec);

// Mean and 95% normal-approximation half-width; the half-width is 0 for a
// single sample.
std::pair<double, double> mean_ci95(const std::vector<double>& samples);

enum class ResultFormat { Csv, Json };

ResultFormat parse_format(std::string_view name);

inline constexpr std::string_view kCsvHeader =
    "scheme,tau_max,loss_max,mean_energy_j,ci95_j,churn_rate,wall_time_s";

std::string format_results(const SweepResult& result, ResultFormat format);
void emit_results(const SweepResult& result, const std::filesystem::path& path,
                  ResultFormat format);
SweepResult parse_results(std::string_view text, ResultFormat format);

// Shortest text that reads back as the same double.
std::string format_double(double value);

}  // namespace qag
