// Acceptance gate: one PASS/FAIL line per criterion, details on the
// following indented lines. Exit status is nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "qag/baselines.hpp"
#include "qag/cost.hpp"
#include "qag/orchestrator.hpp"
#include "qag/qaoa.hpp"
#include "qag/rng.hpp"
#include "qag/scenario.hpp"
#include "qag/sweep.hpp"
#include "support.hpp"

#ifndef QAG_CLI_PATH
#error "QAG_CLI_PATH must name the CLI binary"
#endif

using namespace qag;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;
  void note(const std::string& s) { notes.push_back(s); }
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok    " : "FAILED ") + what);
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Brute-force max cut, independent of the library's routines.
int brute_maxcut(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  int best = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    int cut = 0;
    for (auto [i, j] : edges) cut += static_cast<int>(((m >> i) ^ (m >> j)) & 1U);
    best = std::max(best, cut);
  }
  return best;
}

CutProblem random_graph(Rng& rng, std::size_t n, double density) {
  CutProblem p;
  p.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    p.classes.push_back(i % 3 == 0 ? VertexClass::Application
                                   : (i % 3 == 1 ? VertexClass::Configuration
                                                 : VertexClass::ComputeNode));
    for (std::size_t j = 0; j < i; ++j) {
      if (uniform01(rng) < density) p.edges.emplace_back(j, i);
    }
  }
  if (p.edges.empty()) p.edges.emplace_back(0, n - 1);
  return p;
}

// Cut size of a bitstring recomputed here rather than through the library.
int bits_cut(const std::string& bits, const CutProblem& p) {
  int cut = 0;
  for (auto [i, j] : p.edges) cut += bits[i] != bits[j];
  return cut;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + QAG_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// ---------------------------------------------------------------------------

Verdict small_example_states() {
  Verdict v;
  int hits = 0;
  double slowest = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto start = Clock::now();
    const auto r = solve(fixture_small_example(), QaoaConfig{}, seed);
    slowest = std::max(slowest, seconds_since(start));
    if (!r.tree.steps.empty()) {
      const auto& bits = r.tree.steps[0].bitstring;
      hits += bits == "01001101" || bits == "01001110";
    }
  }
  v.require(hits >= 18, fmt("%.0f/20 runs pick 01001101 or 01001110 (need >= 18)", hits));
  v.require(slowest < 5.0, fmt("slowest run %.3f s (limit 5 s)", slowest));
  return v;
}

Verdict convergence() {
  Verdict v;
  int monotone = 0, within100 = 0, within60 = 0;
  std::size_t near_latest = 0;
  const int seeds = 20;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const auto r = solve(fixture_small_example(), QaoaConfig{}, seed);
    if (r.tree.steps.empty()) continue;
    const auto& t = r.tree.steps[0].trace;
    if (t.empty()) continue;
    bool mono = true;
    for (std::size_t i = 1; i < t.size(); ++i) mono = mono && t[i] <= t[i - 1];
    monotone += mono;
    // Iteration (1-based) at which the final value is first reached.
    const auto first = static_cast<std::size_t>(std::find(t.begin(), t.end(), t.back()) - t.begin()) + 1;
    within100 += t.size() <= 100 && first <= 100;
    within60 += first <= 60;
    std::size_t near = 0;
    while (std::abs(t[near] - t.back()) > 1e-3 * std::abs(t.back())) ++near;
    near_latest = std::max(near_latest, near + 1);
  }
  v.require(monotone == seeds, fmt("%.0f/%.0f traces monotone non-increasing", monotone, seeds));
  v.require(within100 == seeds, fmt("%.0f/%.0f reach their final value within 100 iterations", within100, seeds));
  v.note(fmt("not asserted: every trace is within 0.1%% of its final value by iteration %.0f",
             near_latest));
  v.require(2 * within60 >= seeds, fmt("%.0f/%.0f within 60 iterations (need >= 50%%)", within60, seeds));
  return v;
}

Verdict oracle_gap() {
  Verdict v;
  const auto start = Clock::now();
  int all_served = 0, close = 0, below = 0, qag_churned = 0;
  const int instances = 200;
  for (std::uint64_t seed = 0; seed < instances; ++seed) {
    const auto s = random_small_scenario(seed);
    const auto opt = optimal_solve(s);
    const auto q = solve(s, QaoaConfig{}, seed);
    if (q.system_energy < opt.system_energy * (1 - 1e-9)) ++below;
    if (opt.churned.empty()) {
      ++all_served;
      if (!q.churned.empty()) ++qag_churned;
      if (q.churned.empty() && q.system_energy <= opt.system_energy * 1.05) ++close;
    }
  }
  const double elapsed = seconds_since(start);
  v.note(fmt("Opt serves every app in %.0f/%.0f instances; QAG churns in %.0f of those", all_served,
             instances, qag_churned));
  v.require(close >= 0.85 * all_served,
            fmt("QAG within 5%% of Opt in %.0f/%.0f (%.1f%%, need >= 85%%)", close, all_served,
                all_served ? 100.0 * close / all_served : 0.0));
  v.require(below == 0, fmt("QAG energy below Opt in %.0f/%.0f instances (need 0)", below, instances));
  v.require(elapsed < 120.0, fmt("runtime %.1f s (limit 120 s)", elapsed));
  return v;
}

Verdict maxcut_engine() {
  Verdict v;
  Rng rng(2024);
  int good = 0;
  double worst_p0 = 0.0;
  const int graphs = 100;
  for (int g = 0; g < graphs; ++g) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 2, 10));
    const auto p = random_graph(rng, n, uniform(rng, 0.2, 0.8));
    const int exact = brute_maxcut(n, p.edges);

    const double e0 = expectation(simulate(p, {}), p);
    worst_p0 = std::max(worst_p0, std::abs(e0 + static_cast<double>(p.edges.size()) / 2.0));

    QaoaConfig cfg;
    const auto opt = optimize_params(p, cfg);
    const auto counts = sample(simulate(p, opt.params), cfg.shots, derive_seed(77, g));
    int best = 0;
    for (const auto& [bits, c] : counts) best = std::max(best, bits_cut(bits, p));
    good += best >= 0.8 * exact;
  }
  v.require(good >= 0.9 * graphs,
            fmt("best sampled cut >= 0.8 x max cut on %.0f/%.0f graphs (need >= 90%%)", good, graphs));
  v.require(worst_p0 <= 1e-9, fmt("p=0 expectation vs -|E|/2: worst error %.2e (tol 1e-9)", worst_p0));
  return v;
}

Verdict statevector() {
  Verdict v;
  Rng rng(99);
  double worst_norm = 0.0;
  for (int g = 0; g < 50; ++g) {
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 10));
    auto p = n == 1 ? CutProblem{1, {}, {VertexClass::Application}} : random_graph(rng, n, 0.5);
    QaoaParams params;
    for (int layer = 0; layer < 4; ++layer) {
      params.gammas.push_back(uniform(rng, -3.2, 3.2));
      params.betas.push_back(uniform(rng, -3.2, 3.2));
      // Each prefix of layers is checked, so every layer application is covered.
      worst_norm = std::max(worst_norm, std::abs(simulate(p, params).norm() - 1.0));
    }
  }
  v.require(worst_norm <= 1e-10, fmt("worst norm drift %.2e over 200 layer prefixes (tol 1e-10)", worst_norm));

  double worst_amp = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    Rng r2(n);
    auto p = n == 1 ? CutProblem{1, {}, {VertexClass::Application}} : random_graph(r2, n, 0.5);
    const auto st = simulate(p, {});
    const double expect = 1.0 / std::sqrt(static_cast<double>(std::uint64_t{1} << n));
    for (auto a : st.amplitudes()) worst_amp = std::max(worst_amp, std::abs(a - std::complex<double>(expect, 0.0)));
  }
  v.require(worst_amp <= 1e-12, fmt("p=0 amplitude error %.2e (tol 1e-12)", worst_amp));

  CutProblem edge{2, {{0, 1}}, {VertexClass::Application, VertexClass::Configuration}};
  const QaoaConfig cfg;
  const auto probs = simulate(edge, optimize_params(edge, cfg).params).probabilities();
  const double on_cut = probs[1] + probs[2];
  v.require(on_cut >= 0.9, fmt("single edge: probability on cut states %.6f (need >= 0.9)", on_cut));
  return v;
}

Verdict feasibility_soundness() {
  Verdict v;
  int violations = 0, served = 0;
  const int scenarios = 1000;
  for (std::uint64_t seed = 0; seed < scenarios; ++seed) {
    const auto s = test::fuzz_scenario(derive_seed(31337, seed), 4, 5, 4);
    const auto r = solve(s, QaoaConfig{}, seed);
    const auto report = check_feasibility(r.assignment, build_graph(s), s.applications, s.nodes);
    for (std::size_t h = 0; h < s.applications.size(); ++h) {
      if (r.churned.count(h)) continue;
      ++served;
      if (!r.assignment.rows[h] || !report.apps[h].feasible()) ++violations;
    }
  }
  v.note(fmt("%.0f served applications checked", served));
  v.require(violations == 0, fmt("%.0f violations across %.0f scenarios", violations, scenarios));
  return v;
}

// Checks a one-dimensional slice of sweep rows for non-increasing energy and churn.
void check_slice(Verdict& v, const std::vector<SweepRow>& rows, const char* axis) {
  std::ostringstream line;
  line << axis << ":";
  bool energy = true, churn = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    line << " (" << (axis[0] == 't' ? rows[i].tau_max : rows[i].loss_max) << ": "
         << format_double(std::round(rows[i].mean_energy_j * 100) / 100) << " J, churn "
         << rows[i].churn_rate << ")";
    if (i > 0) {
      energy = energy && rows[i].mean_energy_j <= rows[i - 1].mean_energy_j * (1 + 1e-12);
      churn = churn && rows[i].churn_rate <= rows[i - 1].churn_rate + 1e-12;
    }
  }
  v.note(line.str());
  v.require(energy, std::string("mean energy non-increasing in ") + axis);
  v.require(churn, std::string("churn rate non-increasing in ") + axis);
}

Verdict monotonicity() {
  Verdict v;
  SweepSpec spec;
  spec.source.name = "fixture:small";
  spec.schemes = {Scheme::Qag};
  spec.iterations = 20;
  spec.base_seed = 0;
  spec.tau_grid = {1, 2, 5, 10};
  spec.loss_grid = {20};
  check_slice(v, run_sweep(spec).rows, "tau_max");
  spec.tau_grid = {5};
  spec.loss_grid = {10, 20, 30, 40};
  check_slice(v, run_sweep(spec).rows, "loss_max");
  return v;
}

Verdict baseline_comparison() {
  Verdict v;
  std::size_t iterations = 4;
  if (const char* env = std::getenv("QAG_ACCEPT_LARGE_ITERS")) iterations = std::strtoul(env, nullptr, 10);
  if (iterations == 0) iterations = 1;

  // Fallback: the full large graph exceeds the qubit budget.
  const auto first = solve(fixture_large_scenario(iteration_seed(0, 0)), QaoaConfig{},
                           iteration_seed(0, 0));
  const bool fallback = !first.tree.steps.empty() && first.tree.steps[0].method == SplitMethod::Classical;
  v.require(fallback, fmt("root split of %.0f vertices uses the classical search",
                          first.tree.steps.empty() ? 0.0 : first.tree.steps[0].vertices.size()));

  SweepSpec spec;
  spec.source.name = "fixture:large";
  spec.schemes = {Scheme::Qag, Scheme::Rnf};
  spec.iterations = iterations;
  spec.timing = true;
  std::vector<SweepRow> rows;
  const auto start = Clock::now();
  spec.tau_grid = {1, 2, 5, 10};
  spec.loss_grid = {20};
  for (const auto& r : run_sweep(spec).rows) rows.push_back(r);
  spec.tau_grid = {5};
  spec.loss_grid = {10, 30, 40};
  for (const auto& r : run_sweep(spec).rows) rows.push_back(r);
  const double elapsed = seconds_since(start);

  bool energy_ok = true, churn_ok = true;
  double q_total = 0.0, r_total = 0.0;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    const auto& q = rows[i];
    const auto& r = rows[i + 1];
    const double saving = r.mean_energy_j > 0 ? 100.0 * (1 - q.mean_energy_j / r.mean_energy_j) : 0.0;
    v.note(fmt("tau %g loss %g: QAG %.1f J churn %.3f | RNF ", q.tau_max, q.loss_max, q.mean_energy_j,
               q.churn_rate) +
           fmt("%.1f J churn %.3f | saving %.1f%%", r.mean_energy_j, r.churn_rate, saving));
    energy_ok = energy_ok && q.mean_energy_j <= r.mean_energy_j;
    churn_ok = churn_ok && q.churn_rate <= r.churn_rate + 1e-12;
    q_total += q.mean_energy_j;
    r_total += r.mean_energy_j;
  }
  v.note(fmt("overall saving %.1f%% over %.0f cells (%.0f iterations per cell)",
             100.0 * (1 - q_total / r_total), rows.size() / 2.0, iterations));
  v.require(energy_ok, "QAG mean energy <= RNF in every cell");
  v.require(churn_ok, "QAG churn <= RNF in every cell");
  const double projected = elapsed * 200.0 / static_cast<double>(iterations);
  v.require(projected < 600.0,
            fmt("%.1f s for %.0f iterations, projected %.0f s at 200 iterations (limit 600 s)", elapsed,
                iterations, projected));
  return v;
}

Verdict cli_determinism() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() / "qag_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> invocations = {
      "--seed 5 sweep --scenario random:small --tau-grid 1,5 --loss-grid 20,40 --iterations 3",
      "--seed 5 --format json sweep --scenario fixture:small --tau-grid 1,2,5,10 --loss-grid 20 "
      "--iterations 3",
      "--seed 9 solve --scenario fixture:small --scheme qag --tau-max 5 --loss-max 20",
      "--seed 9 --format json solve --scenario random:small --scheme opt",
      "--seed 2 solve --scenario fixture:large --scheme rnf",
  };
  int identical = 0;
  for (std::size_t i = 0; i < invocations.size(); ++i) {
    const auto a = dir / ("a" + std::to_string(i));
    const auto b = dir / ("b" + std::to_string(i));
    const int ea = run_cli(invocations[i] + " --out \"" + a.string() + "\"");
    const int eb = run_cli(invocations[i] + " --out \"" + b.string() + "\"");
    const auto ta = slurp(a);
    const bool same = ea == 0 && eb == 0 && !ta.empty() && ta == slurp(b);
    identical += same;
    if (!same) v.note("differs: " + invocations[i]);
  }
  v.require(identical == static_cast<int>(invocations.size()),
            fmt("%.0f/%.0f invocations byte-identical on repeat", identical, invocations.size()));
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"small example partition states", small_example_states},
      {"optimizer convergence", convergence},
      {"near-optimality against the exhaustive optimum", oracle_gap},
      {"max-cut engine quality", maxcut_engine},
      {"statevector invariants", statevector},
      {"feasibility soundness", feasibility_soundness},
      {"monotone response to targets", monotonicity},
      {"large fixture against the fixed baseline", baseline_comparison},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    const auto start = Clock::now();
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("exception: ") + e.what());
    }
    std::printf("%s %zu %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                seconds_since(start));
    for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
