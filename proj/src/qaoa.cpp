#include "qag/qaoa.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>

#include "qag/error.hpp"
#include "qag/optimizer.hpp"
#include "qag/rng.hpp"

namespace qag {

namespace {

// Hard ceiling independent of the configurable budget: 2^30 amplitudes is
// already 16 GiB.
constexpr std::size_t kMaxSimulatedQubits = 30;

void check_budget(const CutProblem& problem, std::size_t qubit_budget) {
  if (problem.n > qubit_budget || problem.n > kMaxSimulatedQubits) {
    throw Error(ErrorCode::Budget, "cut problem has " + std::to_string(problem.n) +
                                       " qubits, above the budget of " +
                                       std::to_string(qubit_budget) +
                                       "; use the classical max-cut fallback");
  }
}

std::size_t bit_position(std::size_t qubit, std::size_t n) { return n - 1 - qubit; }

// Cut value of every basis state.
std::vector<int> cut_diagonal(const CutProblem& problem) {
  const std::uint64_t dim = std::uint64_t{1} << problem.n;
  std::vector<int> diag(dim, 0);
  for (const auto& [i, j] : problem.edges) {
    const auto pi = bit_position(i, problem.n);
    const auto pj = bit_position(j, problem.n);
    for (std::uint64_t b = 0; b < dim; ++b) {
      diag[b] += static_cast<int>(((b >> pi) ^ (b >> pj)) & 1U);
    }
  }
  return diag;
}

class Simulator {
 public:
  explicit Simulator(const CutProblem& problem)
      : problem_(problem), diag_(cut_diagonal(problem)) {}

  Statevector run(const QaoaParams& params) const {
    if (params.gammas.size() != params.betas.size()) {
      throw invalid_argument("QAOA parameters need as many gammas as betas");
    }
    const std::size_t n = problem_.n;
    Statevector state(n);
    auto amps = state.amplitudes();
    const double uniform = std::pow(2.0, -static_cast<double>(n) / 2.0);
    std::fill(amps.begin(), amps.end(), std::complex<double>(uniform, 0.0));

    std::vector<std::complex<double>> phase(problem_.edges.size() + 1);
    for (std::size_t layer = 0; layer < params.layers(); ++layer) {
      const double gamma = params.gammas[layer];
      for (std::size_t c = 0; c < phase.size(); ++c) {
        phase[c] = std::polar(1.0, -gamma * static_cast<double>(c));
      }
      for (std::size_t b = 0; b < amps.size(); ++b) amps[b] *= phase[diag_[b]];

      // RX(2 beta): [[c, -is], [-is, c]], spelled out in real arithmetic.
      const double c = std::cos(params.betas[layer]);
      const double s = std::sin(params.betas[layer]);
      auto* raw = reinterpret_cast<double*>(amps.data());
      for (std::size_t q = 0; q < n; ++q) {
        const std::uint64_t stride = std::uint64_t{1} << bit_position(q, n);
        for (std::uint64_t base = 0; base < amps.size(); base += 2 * stride) {
          for (std::uint64_t k = base; k < base + stride; ++k) {
            double* a0 = raw + 2 * k;
            double* a1 = raw + 2 * (k + stride);
            const double r0 = a0[0], i0 = a0[1], r1 = a1[0], i1 = a1[1];
            a0[0] = c * r0 + s * i1;
            a0[1] = c * i0 - s * r1;
            a1[0] = c * r1 + s * i0;
            a1[1] = c * i1 - s * r0;
          }
        }
      }
    }
    return state;
  }

  double expectation(const Statevector& state) const {
    double total = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) total -= std::norm(amps[b]) * diag_[b];
    return total;
  }

 private:
  const CutProblem& problem_;
  std::vector<int> diag_;
};

struct SideCounts {
  std::array<std::array<std::size_t, 3>, 2> per_side{};
};

// Each side ends up as one leaf per application, and every leaf needs a
// configuration and a compute node, so a side with k applications must hold
// at least k of each. For k = 1 this is the single-leaf condition.
bool admissible(const SideCounts& counts) {
  for (const auto& side : counts.per_side) {
    const auto apps = side[static_cast<int>(VertexClass::Application)];
    if (apps == 0) return false;
    if (side[static_cast<int>(VertexClass::Configuration)] < apps ||
        side[static_cast<int>(VertexClass::ComputeNode)] < apps) {
      return false;
    }
  }
  return true;
}

bool admissible_mask(std::uint64_t mask, const CutProblem& problem) {
  SideCounts counts;
  for (std::size_t q = 0; q < problem.n; ++q) {
    const auto side = (mask >> bit_position(q, problem.n)) & 1U;
    ++counts.per_side[side][static_cast<int>(problem.classes[q])];
  }
  return admissible(counts);
}

int cut_mask(std::uint64_t mask, const CutProblem& problem) {
  int cut = 0;
  for (const auto& [i, j] : problem.edges) {
    cut += static_cast<int>(((mask >> bit_position(i, problem.n)) ^
                             (mask >> bit_position(j, problem.n))) &
                            1U);
  }
  return cut;
}

// Exhaustive search over splits with qubit 0 on side 0; ascending masks are
// ascending lexicographic bitstrings, so the first maximum is the smallest.
std::string exhaustive_best_cut(const CutProblem& problem) {
  if (problem.n == 0 || problem.n > kExactCutLimit) {
    throw invalid_argument("exhaustive max-cut needs 1..20 qubits");
  }
  const std::uint64_t half = std::uint64_t{1} << (problem.n - 1);
  int best = -1;
  std::uint64_t best_mask = 0;
  for (std::uint64_t mask = 0; mask < half; ++mask) {
    if (!admissible_mask(mask, problem)) continue;
    const int cut = cut_mask(mask, problem);
    if (cut > best) {
      best = cut;
      best_mask = mask;
    }
  }
  if (best < 0) {
    throw Error(ErrorCode::Partition, "no admissible split of the " + std::to_string(problem.n) +
                                          "-vertex graph exists");
  }
  return to_bitstring(best_mask, problem.n);
}

std::string pick_by_weight(const std::map<std::string, double>& weights,
                           const CutProblem& problem, std::size_t qubit_budget) {
  std::map<std::string, double> folded;
  for (const auto& [bits, w] : weights) {
    if (w > 0.0) folded[canonical_split(bits)] += w;
  }
  const std::string* best = nullptr;
  double best_weight = -1.0;
  int best_cut = -1;
  // Map iteration is lexicographic, so strict comparisons keep the smallest
  // string among equal (weight, cut).
  for (const auto& [bits, w] : folded) {
    if (!is_valid_split(bits, problem)) continue;
    const int cut = cut_value(bits, problem);
    if (w > best_weight || (w == best_weight && cut > best_cut)) {
      best = &bits;
      best_weight = w;
      best_cut = cut;
    }
  }
  if (best != nullptr) return *best;
  if (problem.n <= qubit_budget && problem.n <= kExactCutLimit) {
    return exhaustive_best_cut(problem);
  }
  return classical_maxcut(problem);
}

}  // namespace

void CutProblem::validate() const {
  if (classes.size() != n) throw invalid_argument("cut problem: one class per qubit required");
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [i, j] : edges) {
    if (i >= n || j >= n) throw invalid_argument("cut problem: edge index out of range");
    if (i == j) throw invalid_argument("cut problem: self-loop");
    if (!seen.insert(std::minmax(i, j)).second) {
      throw invalid_argument("cut problem: duplicate edge");
    }
  }
}

CutProblem make_cut_problem(const ComplementEdgeList& complement) {
  CutProblem p;
  p.n = complement.vertices.size();
  p.edges = complement.edges;
  for (const auto& v : complement.vertices) p.classes.push_back(v.cls);
  p.validate();
  return p;
}

std::string to_bitstring(std::uint64_t basis_index, std::size_t n) {
  std::string bits(n, '0');
  for (std::size_t q = 0; q < n; ++q) {
    if ((basis_index >> bit_position(q, n)) & 1U) bits[q] = '1';
  }
  return bits;
}

std::uint64_t from_bitstring(std::string_view bits) {
  if (bits.size() > 64) throw invalid_argument("bitstring longer than 64 qubits");
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw invalid_argument("bitstring may only contain 0 and 1");
    index = (index << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return index;
}

int cut_value(std::string_view bits, const CutProblem& problem) {
  if (bits.size() != problem.n) {
    throw invalid_argument("bitstring has " + std::to_string(bits.size()) + " bits, problem has " +
                           std::to_string(problem.n) + " qubits");
  }
  int cut = 0;
  for (const auto& [i, j] : problem.edges) cut += bits[i] != bits[j] ? 1 : 0;
  return cut;
}

Statevector::Statevector(std::size_t qubits)
    : qubits_(qubits), amplitudes_(std::size_t{1} << qubits) {
  amplitudes_[0] = 1.0;
}

std::vector<double> Statevector::probabilities() const {
  std::vector<double> p(amplitudes_.size());
  for (std::size_t b = 0; b < p.size(); ++b) p[b] = std::norm(amplitudes_[b]);
  return p;
}

double Statevector::norm() const {
  double total = 0.0;
  for (const auto& a : amplitudes_) total += std::norm(a);
  return std::sqrt(total);
}

Statevector simulate(const CutProblem& problem, const QaoaParams& params,
                     std::size_t qubit_budget) {
  problem.validate();
  check_budget(problem, qubit_budget);
  return Simulator(problem).run(params);
}

double expectation(const Statevector& state, const CutProblem& problem) {
  if (state.qubits() != problem.n) {
    throw invalid_argument("statevector and cut problem differ in qubit count");
  }
  double total = 0.0;
  const auto amps = state.amplitudes();
  for (std::uint64_t b = 0; b < amps.size(); ++b) {
    total -= std::norm(amps[b]) * cut_mask(b, problem);
  }
  return total;
}

OptimizeResult optimize_params(const CutProblem& problem, const QaoaConfig& config) {
  problem.validate();
  check_budget(problem, config.qubit_budget);
  if (config.layers == 0) {
    // Nothing to tune: the Hadamard wall alone.
    const Simulator sim(problem);
    OptimizeResult r;
    r.value = sim.expectation(sim.run({}));
    r.trace.assign(1, r.value);
    r.evaluations = 1;
    return r;
  }
  const Simulator sim(problem);
  const std::size_t p = config.layers;
  auto unpack = [p](std::span<const double> x) {
    QaoaParams params;
    params.gammas.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(p));
    params.betas.assign(x.begin() + static_cast<std::ptrdiff_t>(p), x.end());
    return params;
  };
  std::vector<double> x0(p, config.gamma0);
  x0.insert(x0.end(), p, config.beta0);

  NelderMeadOptions options;
  options.max_iters = config.max_iters;
  const auto minimized = nelder_mead(
      [&](std::span<const double> x) { return sim.expectation(sim.run(unpack(x))); }, x0, options);

  OptimizeResult r;
  r.params = unpack(minimized.x);
  r.value = minimized.value;
  r.trace = minimized.trace;
  r.evaluations = minimized.evaluations;
  return r;
}

ShotCounts sample(const Statevector& state, std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) throw invalid_argument("sample: shots must be positive");
  const auto probs = state.probabilities();
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());
  const double total = cdf.back();

  Rng rng(seed);
  std::vector<std::uint64_t> hits(probs.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    // Skip zero-probability states that share a cdf value with their successor.
    auto idx = static_cast<std::size_t>(it - cdf.begin());
    while (probs[idx] == 0.0 && idx + 1 < probs.size()) ++idx;
    ++hits[idx];
  }
  ShotCounts counts;
  for (std::size_t b = 0; b < hits.size(); ++b) {
    if (hits[b] != 0) counts.emplace(to_bitstring(b, state.qubits()), hits[b]);
  }
  return counts;
}

bool is_valid_split(std::string_view bits, const CutProblem& problem) {
  if (bits.size() != problem.n) throw invalid_argument("bitstring length does not match problem");
  SideCounts counts;
  for (std::size_t q = 0; q < problem.n; ++q) {
    ++counts.per_side[bits[q] == '1' ? 1 : 0][static_cast<int>(problem.classes[q])];
  }
  return admissible(counts);
}

std::string canonical_split(std::string_view bits) {
  std::string out(bits);
  if (!out.empty() && out[0] == '1') {
    for (auto& c : out) c = c == '1' ? '0' : '1';
  }
  return out;
}

std::string best_valid_state(const ShotCounts& counts, const CutProblem& problem,
                             std::size_t qubit_budget) {
  problem.validate();
  std::map<std::string, double> weights;
  for (const auto& [bits, count] : counts) {
    if (bits.size() != problem.n) throw invalid_argument("sampled bitstring has wrong length");
    weights[bits] += static_cast<double>(count);
  }
  return pick_by_weight(weights, problem, qubit_budget);
}

std::string best_valid_state(std::span<const double> probabilities, const CutProblem& problem,
                             std::size_t qubit_budget) {
  problem.validate();
  if (probabilities.size() != (std::size_t{1} << problem.n)) {
    throw invalid_argument("distribution size does not match 2^n");
  }
  std::map<std::string, double> weights;
  for (std::size_t b = 0; b < probabilities.size(); ++b) {
    if (probabilities[b] > 0.0) weights[to_bitstring(b, problem.n)] += probabilities[b];
  }
  return pick_by_weight(weights, problem, qubit_budget);
}

std::string classical_maxcut(const CutProblem& problem, std::uint64_t seed) {
  problem.validate();
  if (problem.n == 0) throw Error(ErrorCode::Partition, "empty graph cannot be split");
  if (problem.n <= kExactCutLimit) return exhaustive_best_cut(problem);

  const std::size_t n = problem.n;
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& [i, j] : problem.edges) {
    adjacency[i].push_back(j);
    adjacency[j].push_back(i);
  }
  std::array<std::vector<std::size_t>, 3> by_class;
  for (std::size_t q = 0; q < n; ++q) by_class[static_cast<int>(problem.classes[q])].push_back(q);

  auto side_counts = [&](const std::string& bits) {
    SideCounts counts;
    for (std::size_t q = 0; q < n; ++q) {
      ++counts.per_side[bits[q] == '1' ? 1 : 0][static_cast<int>(problem.classes[q])];
    }
    return counts;
  };

  constexpr int kRestarts = 16;
  Rng rng(derive_seed(seed, 0xc0ffee));
  std::string best;
  int best_cut = -1;
  for (int restart = 0; restart < kRestarts; ++restart) {
    // Random start: one application on each side, the rest at random; then
    // each side gets as many configurations and nodes as it has
    // applications before the remainder is scattered.
    std::string bits(n, '0');
    std::array<std::size_t, 2> apps_on{0, 0};
    for (int cls = 0; cls < 3; ++cls) {
      std::vector<std::size_t> shuffled = by_class[cls];
      for (std::size_t k = shuffled.size(); k > 1; --k) {
        std::swap(shuffled[k - 1], shuffled[static_cast<std::size_t>(uniform_int(
                                       rng, 0, static_cast<std::int64_t>(k) - 1))]);
      }
      const std::array<std::size_t, 2> quota =
          cls == 0 ? std::array<std::size_t, 2>{1, 1} : apps_on;
      for (std::size_t k = 0; k < shuffled.size(); ++k) {
        bool side = false;
        if (k < quota[0]) {
          side = false;
        } else if (k < quota[0] + quota[1]) {
          side = true;
        } else {
          side = uniform01(rng) < 0.5;
        }
        bits[shuffled[k]] = side ? '1' : '0';
        if (cls == 0) ++apps_on[side ? 1 : 0];
      }
    }
    auto counts = side_counts(bits);
    if (!admissible(counts)) continue;

    // Best-improvement single flips that keep the split admissible.
    for (;;) {
      int best_delta = 0;
      std::size_t best_vertex = n;
      for (std::size_t v = 0; v < n; ++v) {
        int same = 0;
        int other = 0;
        for (auto u : adjacency[v]) (bits[u] == bits[v] ? same : other)++;
        const int delta = same - other;
        if (delta <= best_delta) continue;
        auto trial = counts;
        const int from = bits[v] == '1' ? 1 : 0;
        const int cls = static_cast<int>(problem.classes[v]);
        --trial.per_side[from][cls];
        ++trial.per_side[1 - from][cls];
        if (!admissible(trial)) continue;
        best_delta = delta;
        best_vertex = v;
      }
      if (best_vertex == n) break;
      const int from = bits[best_vertex] == '1' ? 1 : 0;
      const int cls = static_cast<int>(problem.classes[best_vertex]);
      --counts.per_side[from][cls];
      ++counts.per_side[1 - from][cls];
      bits[best_vertex] = bits[best_vertex] == '1' ? '0' : '1';
    }
    const auto canonical = canonical_split(bits);
    const int cut = cut_value(canonical, problem);
    if (cut > best_cut || (cut == best_cut && canonical < best)) {
      best = canonical;
      best_cut = cut;
    }
  }
  if (best_cut < 0) {
    throw Error(ErrorCode::Partition, "local search found no admissible split of the " +
                                          std::to_string(n) + "-vertex graph");
  }
  return best;
}

PartitionChoice choose_partition(const CutProblem& problem, const QaoaConfig& config,
                                 std::uint64_t seed) {
  PartitionChoice choice;
  if (problem.n > config.qubit_budget || problem.n > kMaxSimulatedQubits) {
    choice.method = CutMethod::Classical;
    choice.bitstring = classical_maxcut(problem, seed);
    return choice;
  }
  const auto optimized = optimize_params(problem, config);
  const auto state = Simulator(problem).run(optimized.params);
  choice.trace = optimized.trace;
  choice.counts = sample(state, config.shots, seed);
  choice.bitstring = best_valid_state(choice.counts, problem, config.qubit_budget);
  return choice;
}

}  // namespace qag
