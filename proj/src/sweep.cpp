#include "qag/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "qag/error.hpp"
#include "qag/orchestrator.hpp"
#include "qag/rng.hpp"

namespace qag {

namespace {

constexpr std::uint64_t kSolverTag = 0x5eed;

std::vector<std::size_t> draw_subset(Rng& rng, std::size_t total, std::size_t want) {
  std::vector<std::size_t> idx(total);
  for (std::size_t i = 0; i < total; ++i) idx[i] = i;
  if (want == 0 || want >= total) return idx;
  for (std::size_t k = 0; k < want; ++k) {
    const auto pick = static_cast<std::size_t>(
        uniform_int(rng, static_cast<std::int64_t>(k), static_cast<std::int64_t>(total - 1)));
    std::swap(idx[k], idx[pick]);
  }
  idx.resize(want);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Scenario subsample(const Scenario& full, std::size_t configs, std::size_t nodes,
                   std::uint64_t seed) {
  Rng rng(seed);
  const auto keep_c = draw_subset(rng, full.configurations.size(), configs);
  const auto keep_n = draw_subset(rng, full.nodes.size(), nodes);

  Scenario out;
  out.schema_version = full.schema_version;
  out.applications = full.applications;
  for (auto c : keep_c) out.configurations.push_back(full.configurations[c]);
  for (auto n : keep_n) out.nodes.push_back(full.nodes[n]);
  out.profiles = ProfileTable(out.applications.size(), keep_c.size());
  for (std::size_t h = 0; h < out.applications.size(); ++h) {
    for (std::size_t c = 0; c < keep_c.size(); ++c) out.profiles.set(h, c, full.profile(h, keep_c[c]));
  }
  for (auto& app : out.applications) {
    const bool kept = std::any_of(out.configurations.begin(), out.configurations.end(),
                                  [&](const Configuration& c) { return c.id == app.fixed_config; });
    if (!kept) app.fixed_config.clear();
  }
  return out;
}

OrchestrationResult run_scheme(Scheme scheme, const Scenario& scenario, const SweepSpec& spec,
                               std::uint64_t seed) {
  switch (scheme) {
    case Scheme::Qag:
      return solve(scenario, spec.qaoa, derive_seed(seed, kSolverTag));
    case Scheme::Opt:
      return optimal_solve(scenario, spec.oracle_budget);
    case Scheme::Rnf:
      return rnf_solve(scenario);
  }
  throw invalid_argument("unknown scheme");
}

double parse_double(std::string_view field, std::size_t line) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": bad number '" +
                                      std::string(field) + "'");
  }
  return value;
}

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Qag:
      return "qag";
    case Scheme::Opt:
      return "opt";
    case Scheme::Rnf:
      return "rnf";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "qag") return Scheme::Qag;
  if (lower == "opt") return Scheme::Opt;
  if (lower == "rnf") return Scheme::Rnf;
  throw invalid_argument("unknown scheme '" + std::string(name) + "' (expected qag, opt or rnf)");
}

std::size_t default_qubit_budget() {
  const char* env = std::getenv("QAG_QUBIT_BUDGET");
  if (env == nullptr || *env == '\0') return kDefaultQubitBudget;
  std::size_t value = 0;
  const std::string_view text(env);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw invalid_argument("QAG_QUBIT_BUDGET must be a non-negative integer, got '" +
                           std::string(text) + "'");
  }
  return value;
}

Scenario ScenarioSource::instance(std::uint64_t seed) const {
  if (name == "fixture:small") return fixture_small_example();
  if (name == "fixture:large") return fixture_large_scenario(seed);
  if (name == "random:small") return random_small_scenario(seed);
  if (name.rfind("fixture:", 0) == 0 || name.rfind("random:", 0) == 0) {
    throw invalid_argument("unknown scenario source '" + name + "'");
  }
  const auto loaded = load_scenario(name);
  if (sample_configs == 0 && sample_nodes == 0) return loaded;
  return subsample(loaded, sample_configs, sample_nodes, seed);
}

void SweepSpec::validate() const {
  if (iterations == 0) throw invalid_argument("sweep: iterations must be at least 1");
  if (tau_grid.empty()) throw invalid_argument("sweep: latency grid is empty");
  if (loss_grid.empty()) throw invalid_argument("sweep: loss grid is empty");
  if (schemes.empty()) throw invalid_argument("sweep: no scheme selected");
  for (double t : tau_grid) {
    if (!(t > 0.0) || !std::isfinite(t)) throw invalid_argument("sweep: latency targets must be positive");
  }
  for (double l : loss_grid) {
    if (!(l > 0.0) || !std::isfinite(l)) throw invalid_argument("sweep: loss targets must be positive");
  }
}

std::uint64_t iteration_seed(std::uint64_t base_seed, std::size_t iteration) {
  return derive_seed(base_seed, iteration);
}

std::pair<double, double> mean_ci95(const std::vector<double>& samples) {
  if (samples.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  if (samples.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return {mean, 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();

  std::vector<Scenario> instances;
  instances.reserve(spec.iterations);
  for (std::size_t i = 0; i < spec.iterations; ++i) {
    instances.push_back(spec.source.instance(iteration_seed(spec.base_seed, i)));
  }
  if (std::find(spec.schemes.begin(), spec.schemes.end(), Scheme::Opt) != spec.schemes.end()) {
    for (const auto& s : instances) {
      if (oracle_search_space(s) > spec.oracle_budget) {
        std::ostringstream msg;
        msg << "Opt requested but the exhaustive search space " << oracle_search_space(s)
            << " exceeds the oracle budget " << spec.oracle_budget;
        throw Error(ErrorCode::Budget, msg.str());
      }
    }
  }

  SweepResult result;
  for (double tau : spec.tau_grid) {
    for (double loss : spec.loss_grid) {
      const std::size_t k = spec.schemes.size();
      std::vector<std::vector<double>> energy(k);
      std::vector<std::size_t> churned(k, 0);
      std::vector<std::size_t> app_instances(k, 0);
      std::vector<double> seconds(k, 0.0);
      for (std::size_t i = 0; i < instances.size(); ++i) {
        Scenario scenario = instances[i];
        scenario.set_targets(tau, loss);
        const auto seed = iteration_seed(spec.base_seed, i);
        for (std::size_t s = 0; s < k; ++s) {
          const auto start = std::chrono::steady_clock::now();
          const auto r = run_scheme(spec.schemes[s], scenario, spec, seed);
          if (spec.timing) {
            seconds[s] +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          }
          energy[s].push_back(r.system_energy);
          churned[s] += r.churned.size();
          app_instances[s] += scenario.applications.size();
        }
      }
      for (std::size_t s = 0; s < k; ++s) {
        const auto [mean, ci] = mean_ci95(energy[s]);
        result.rows.push_back(SweepRow{
            spec.schemes[s], tau, loss, mean, ci,
            static_cast<double>(churned[s]) / static_cast<double>(app_instances[s]),
            seconds[s] / static_cast<double>(instances.size())});
      }
    }
  }
  return result;
}

ResultFormat parse_format(std::string_view name) {
  if (name == "csv") return ResultFormat::Csv;
  if (name == "json") return ResultFormat::Json;
  throw invalid_argument("unknown format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw invalid_argument("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string format_results(const SweepResult& result, ResultFormat format) {
  if (format == ResultFormat::Json) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
      rows.push_back({{"scheme", to_string(r.scheme)},
                      {"tau_max", r.tau_max},
                      {"loss_max", r.loss_max},
                      {"mean_energy_j", r.mean_energy_j},
                      {"ci95_j", r.ci95_j},
                      {"churn_rate", r.churn_rate},
                      {"wall_time_s", r.wall_time_s}});
    }
    nlohmann::ordered_json doc{{"rows", rows}};
    return doc.dump(2) + "\n";
  }
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : result.rows) {
    out += to_string(r.scheme);
    for (double v : {r.tau_max, r.loss_max, r.mean_energy_j, r.ci95_j, r.churn_rate,
                     r.wall_time_s}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

void emit_results(const SweepResult& result, const std::filesystem::path& path,
                  ResultFormat format) {
  const auto text = format_results(result, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

SweepResult parse_results(std::string_view text, ResultFormat format) {
  SweepResult result;
  if (format == ResultFormat::Json) {
    try {
      const auto doc = nlohmann::json::parse(text);
      for (const auto& r : doc.at("rows")) {
        result.rows.push_back(SweepRow{parse_scheme(r.at("scheme").get<std::string>()),
                                       r.at("tau_max").get<double>(),
                                       r.at("loss_max").get<double>(),
                                       r.at("mean_energy_j").get<double>(),
                                       r.at("ci95_j").get<double>(),
                                       r.at("churn_rate").get<double>(),
                                       r.at("wall_time_s").get<double>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, std::string("results: ") + e.what());
    }
    return result;
  }

  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(ErrorCode::Parse, "results: missing or unexpected header row");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 7) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": expected 7 fields, got " +
                                        std::to_string(fields.size()));
    }
    SweepRow row;
    row.scheme = parse_scheme(fields[0]);
    row.tau_max = parse_double(fields[1], line_no);
    row.loss_max = parse_double(fields[2], line_no);
    row.mean_energy_j = parse_double(fields[3], line_no);
    row.ci95_j = parse_double(fields[4], line_no);
    row.churn_rate = parse_double(fields[5], line_no);
    row.wall_time_s = parse_double(fields[6], line_no);
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace qag
