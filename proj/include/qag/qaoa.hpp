#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qag/graph.hpp"

namespace qag {

inline constexpr std::size_t kDefaultQubitBudget = 20;
// Largest problem the exhaustive routines enumerate.
inline constexpr std::size_t kExactCutLimit = 20;

// Max-cut instance over n qubits. Qubit i is vertex i of the complement
// graph; `classes` records which vertex class each qubit stands for.
struct CutProblem {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<VertexClass> classes;

  // Throws on out-of-range indices, self-loops or duplicate edges.
  void validate() const;
};

CutProblem make_cut_problem(const ComplementEdgeList& complement);

// Bitstrings are written qubit 0 first: character i is the measured value of
// qubit i, i.e. bit (n - 1 - i) of the basis-state index.
std::string to_bitstring(std::uint64_t basis_index, std::size_t n);
std::uint64_t from_bitstring(std::string_view bits);

// Number of edges whose endpoints fall on different sides.
int cut_value(std::string_view bits, const CutProblem& problem);

struct QaoaParams {
  std::vector<double> gammas;
  std::vector<double> betas;

  std::size_t layers() const { return gammas.size(); }
};

struct QaoaConfig {
  std::size_t layers = 2;
  std::uint64_t shots = 100;
  std::size_t max_iters = 100;
  std::size_t qubit_budget = kDefaultQubitBudget;
  double gamma0 = -1.0;
  double beta0 = -3.0;
};

class Statevector {
 public:
  explicit Statevector(std::size_t qubits);

  std::size_t qubits() const { return qubits_; }
  std::span<const std::complex<double>> amplitudes() const { return amplitudes_; }
  std::span<std::complex<double>> amplitudes() { return amplitudes_; }
  std::vector<double> probabilities() const;
  double norm() const;

 private:
  std::size_t qubits_;
  std::vector<std::complex<double>> amplitudes_;
};

// Hadamard wall, then per layer k: phase exp(-i gamma_k C) with C the cut
// operator, followed by RX(2 beta_k) on every qubit.
Statevector simulate(const CutProblem& problem, const QaoaParams& params,
                     std::size_t qubit_budget = kDefaultQubitBudget);

// Expected value of the negated cut; minimizing it maximizes the expected cut.
double expectation(const Statevector& state, const CutProblem& problem);

struct OptimizeResult {
  QaoaParams params;
  double value = 0.0;
  std::vector<double> trace;  // best-so-far objective per optimizer iteration
  std::size_t evaluations = 0;
};

// Starts from (gamma0, beta0) replicated across layers and minimizes the
// exact expectation with a downhill simplex.
OptimizeResult optimize_params(const CutProblem& problem, const QaoaConfig& config);

using ShotCounts = std::map<std::string, std::uint64_t>;

ShotCounts sample(const Statevector& state, std::uint64_t shots, std::uint64_t seed);

// A split is admissible when both sides hold an application vertex and each
// side holds at least as many configurations, and as many compute nodes, as
// applications (so a single-application side has one of each).
bool is_valid_split(std::string_view bits, const CutProblem& problem);

// A bitstring and its complement describe the same split; this returns the
// representative with qubit 0 on side 0.
std::string canonical_split(std::string_view bits);

// Most frequent admissible split, counting a bitstring and its complement
// together (ties: larger cut, then lexicographically smaller). When no
// sampled split is admissible, the best admissible cut over all states is
// returned. Throws Error(Partition) when no admissible split exists.
std::string best_valid_state(const ShotCounts& counts, const CutProblem& problem,
                             std::size_t qubit_budget = kDefaultQubitBudget);
std::string best_valid_state(std::span<const double> probabilities, const CutProblem& problem,
                             std::size_t qubit_budget = kDefaultQubitBudget);

// Exact for n <= kExactCutLimit; otherwise best of 16 seeded restarts of
// single-vertex-flip local search. Only admissible splits are returned.
std::string classical_maxcut(const CutProblem& problem, std::uint64_t seed = 0);

enum class CutMethod { Qaoa, Classical };

struct PartitionChoice {
  std::string bitstring;
  CutMethod method = CutMethod::Qaoa;
  std::vector<double> trace;
  ShotCounts counts;
};

// Runs the full optimize / simulate / sample / select pipeline, or the
// classical search when the problem exceeds the qubit budget.
PartitionChoice choose_partition(const CutProblem& problem, const QaoaConfig& config,
                                 std::uint64_t seed);

}  // namespace qag
