#include "qag/qag.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <json.hpp>
#include <memory>
#include <new>
#include <string>

#include "qag/baselines.hpp"
#include "qag/error.hpp"
#include "qag/orchestrator.hpp"
#include "qag/sweep.hpp"

struct qag_scenario {
  qag::Scenario value;
};

struct qag_result {
  qag::OrchestrationResult value;
};

struct qag_sweep {
  qag::SweepSpec spec;
  qag::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

qag_status fail(qag_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

qag_status map_code(qag::ErrorCode code) {
  switch (code) {
    case qag::ErrorCode::InvalidArgument:
      return QAG_ERR_INVALID_ARGUMENT;
    case qag::ErrorCode::Parse:
      return QAG_ERR_PARSE;
    case qag::ErrorCode::Validation:
      return QAG_ERR_VALIDATION;
    case qag::ErrorCode::Version:
      return QAG_ERR_VERSION;
    case qag::ErrorCode::Budget:
      return QAG_ERR_BUDGET;
    case qag::ErrorCode::Partition:
      return QAG_ERR_PARTITION;
    case qag::ErrorCode::Io:
      return QAG_ERR_IO;
  }
  return QAG_ERR_INTERNAL;
}

template <typename F>
qag_status guarded(F&& body) {
  try {
    body();
    return QAG_OK;
  } catch (const qag::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QAG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QAG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QAG_ERR_INTERNAL, "unknown error");
  }
}

#define QAG_REQUIRE(ptr)                                                 \
  do {                                                                   \
    if ((ptr) == nullptr) {                                              \
      return fail(QAG_ERR_INVALID_ARGUMENT, #ptr " must not be NULL");   \
    }                                                                    \
  } while (0)

char* copy_out(const std::string& s) {
  auto* buf = static_cast<char*>(std::malloc(s.size() + 1));
  if (buf == nullptr) throw std::bad_alloc();
  std::memcpy(buf, s.data(), s.size() + 1);
  return buf;
}

qag::Scheme to_scheme(qag_scheme s) {
  switch (s) {
    case QAG_SCHEME_QAG:
      return qag::Scheme::Qag;
    case QAG_SCHEME_OPT:
      return qag::Scheme::Opt;
    case QAG_SCHEME_RNF:
      return qag::Scheme::Rnf;
  }
  throw qag::invalid_argument("unknown scheme value " + std::to_string(static_cast<int>(s)));
}

qag_scheme from_scheme(qag::Scheme s) {
  switch (s) {
    case qag::Scheme::Qag:
      return QAG_SCHEME_QAG;
    case qag::Scheme::Opt:
      return QAG_SCHEME_OPT;
    case qag::Scheme::Rnf:
      return QAG_SCHEME_RNF;
  }
  return QAG_SCHEME_QAG;
}

qag::ResultFormat to_format(qag_format f) {
  switch (f) {
    case QAG_FORMAT_CSV:
      return qag::ResultFormat::Csv;
    case QAG_FORMAT_JSON:
      return qag::ResultFormat::Json;
  }
  throw qag::invalid_argument("unknown format value " + std::to_string(static_cast<int>(f)));
}

qag::QaoaConfig to_qaoa(const qag_options& o) {
  qag::QaoaConfig c;
  c.layers = o.layers;
  c.shots = o.shots;
  c.max_iters = o.max_iters;
  c.qubit_budget = o.qubit_budget;
  if (c.shots == 0) throw qag::invalid_argument("shots must be positive");
  return c;
}

qag_app_row app_row(const qag::OrchestrationResult& r, std::size_t h) {
  qag_app_row row{};
  const auto& placement = r.assignment.rows.at(h);
  const auto& outcome = r.per_app.at(h);
  row.deployed = placement.has_value() ? 1 : 0;
  row.feasible = outcome.feasible ? 1 : 0;
  if (placement) {
    row.config = placement->config;
    row.node = placement->node;
    row.rate_tops = placement->rate;
  }
  row.energy_j = outcome.energy;
  row.latency_s = outcome.latency;
  row.loss_pct = outcome.loss;
  return row;
}

std::string format_result(const qag::OrchestrationResult& r, const qag::Scenario& s,
                          qag_format format) {
  const std::size_t apps = r.per_app.size();
  if (apps != s.applications.size()) {
    throw qag::invalid_argument("result and scenario differ in application count");
  }
  if (format == QAG_FORMAT_JSON) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t h = 0; h < apps; ++h) {
      const auto row = app_row(r, h);
      nlohmann::ordered_json j{{"app", s.applications[h].id}};
      j["config"] = row.deployed ? nlohmann::ordered_json(s.configurations[row.config].id) : nullptr;
      j["node"] = row.deployed ? nlohmann::ordered_json(s.nodes[row.node].id) : nullptr;
      j["rate_tops"] = row.rate_tops;
      j["energy_j"] = row.energy_j;
      j["latency_s"] = row.latency_s;
      j["loss_pct"] = row.loss_pct;
      j["status"] = row.feasible ? "served" : "churned";
      rows.push_back(std::move(j));
    }
    nlohmann::ordered_json doc{{"apps", rows},
                               {"system_energy_j", r.system_energy},
                               {"churned", r.churned.size()}};
    return doc.dump(2) + "\n";
  }
  std::string out = "app,config,node,rate_tops,energy_j,latency_s,loss_pct,status\n";
  for (std::size_t h = 0; h < apps; ++h) {
    const auto row = app_row(r, h);
    out += s.applications[h].id + ",";
    out += row.deployed ? s.configurations[row.config].id + "," + s.nodes[row.node].id : ",";
    for (double v : {row.rate_tops, row.energy_j, row.latency_s, row.loss_pct}) {
      out += "," + qag::format_double(v);
    }
    out += row.feasible ? ",served\n" : ",churned\n";
  }
  out += "# system_energy_j=" + qag::format_double(r.system_energy) +
         " churned=" + std::to_string(r.churned.size()) + "\n";
  return out;
}

}  // namespace

extern "C" {

const char* qag_last_error(void) { return g_last_error.c_str(); }

const char* qag_status_name(qag_status status) {
  switch (status) {
    case QAG_OK:
      return "ok";
    case QAG_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case QAG_ERR_PARSE:
      return "parse error";
    case QAG_ERR_VALIDATION:
      return "validation error";
    case QAG_ERR_VERSION:
      return "unsupported version";
    case QAG_ERR_BUDGET:
      return "budget exceeded";
    case QAG_ERR_PARTITION:
      return "partition failure";
    case QAG_ERR_IO:
      return "i/o error";
    case QAG_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void qag_string_free(char* s) { std::free(s); }

qag_status qag_options_default(qag_options* out) {
  QAG_REQUIRE(out);
  return guarded([&] {
    const qag::QaoaConfig c;
    out->layers = c.layers;
    out->shots = c.shots;
    out->max_iters = c.max_iters;
    out->qubit_budget = qag::default_qubit_budget();
    out->oracle_budget = qag::kDefaultOracleBudget;
  });
}

qag_status qag_parse_scheme(const char* name, qag_scheme* out) {
  QAG_REQUIRE(name);
  QAG_REQUIRE(out);
  return guarded([&] { *out = from_scheme(qag::parse_scheme(name)); });
}

const char* qag_scheme_name(qag_scheme scheme) {
  switch (scheme) {
    case QAG_SCHEME_QAG:
      return "qag";
    case QAG_SCHEME_OPT:
      return "opt";
    case QAG_SCHEME_RNF:
      return "rnf";
  }
  return "?";
}

qag_status qag_parse_format(const char* name, qag_format* out) {
  QAG_REQUIRE(name);
  QAG_REQUIRE(out);
  return guarded([&] {
    *out = qag::parse_format(name) == qag::ResultFormat::Json ? QAG_FORMAT_JSON : QAG_FORMAT_CSV;
  });
}

qag_status qag_scenario_open(const char* source, uint64_t seed, qag_scenario** out) {
  QAG_REQUIRE(source);
  QAG_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    qag::ScenarioSource src;
    src.name = source;
    *out = new qag_scenario{src.instance(seed)};
  });
}

qag_status qag_scenario_save(const qag_scenario* scenario, const char* path) {
  QAG_REQUIRE(scenario);
  QAG_REQUIRE(path);
  return guarded([&] { qag::save_scenario(scenario->value, path); });
}

void qag_scenario_free(qag_scenario* scenario) { delete scenario; }

qag_status qag_scenario_set_targets(qag_scenario* scenario, double latency_max_s,
                                    double loss_max_pct) {
  QAG_REQUIRE(scenario);
  return guarded([&] {
    auto copy = scenario->value;
    copy.set_targets(latency_max_s, loss_max_pct);
    copy.validate();
    scenario->value = std::move(copy);
  });
}

size_t qag_scenario_app_count(const qag_scenario* scenario) {
  return scenario ? scenario->value.applications.size() : 0;
}

size_t qag_scenario_config_count(const qag_scenario* scenario) {
  return scenario ? scenario->value.configurations.size() : 0;
}

size_t qag_scenario_node_count(const qag_scenario* scenario) {
  return scenario ? scenario->value.nodes.size() : 0;
}

const char* qag_scenario_app_id(const qag_scenario* scenario, size_t index) {
  if (!scenario || index >= scenario->value.applications.size()) return nullptr;
  return scenario->value.applications[index].id.c_str();
}

const char* qag_scenario_config_id(const qag_scenario* scenario, size_t index) {
  if (!scenario || index >= scenario->value.configurations.size()) return nullptr;
  return scenario->value.configurations[index].id.c_str();
}

const char* qag_scenario_node_id(const qag_scenario* scenario, size_t index) {
  if (!scenario || index >= scenario->value.nodes.size()) return nullptr;
  return scenario->value.nodes[index].id.c_str();
}

qag_status qag_write_fixtures(const char* directory, uint64_t seed) {
  QAG_REQUIRE(directory);
  return guarded([&] {
    const std::filesystem::path dir(directory);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw qag::Error(qag::ErrorCode::Io, "cannot create '" + dir.string() + "': " + ec.message());
    qag::save_scenario(qag::fixture_small_example(), dir / "small.json");
    qag::save_scenario(qag::fixture_large_scenario(seed), dir / "large.json");
  });
}

qag_status qag_solve(const qag_scenario* scenario, qag_scheme scheme, const qag_options* options,
                     uint64_t seed, qag_result** out) {
  QAG_REQUIRE(scenario);
  QAG_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    qag_options opts{};
    if (options != nullptr) {
      opts = *options;
    } else if (qag_options_default(&opts) != QAG_OK) {
      throw qag::invalid_argument(g_last_error);
    }
    qag::OrchestrationResult r;
    switch (to_scheme(scheme)) {
      case qag::Scheme::Qag:
        r = qag::solve(scenario->value, to_qaoa(opts), seed);
        break;
      case qag::Scheme::Opt:
        r = qag::optimal_solve(scenario->value, opts.oracle_budget);
        break;
      case qag::Scheme::Rnf:
        r = qag::rnf_solve(scenario->value);
        break;
    }
    *out = new qag_result{std::move(r)};
  });
}

void qag_result_free(qag_result* result) { delete result; }

size_t qag_result_app_count(const qag_result* result) {
  return result ? result->value.per_app.size() : 0;
}

size_t qag_result_churn_count(const qag_result* result) {
  return result ? result->value.churned.size() : 0;
}

double qag_result_system_energy(const qag_result* result) {
  return result ? result->value.system_energy : 0.0;
}

qag_status qag_result_app(const qag_result* result, size_t app, qag_app_row* out) {
  QAG_REQUIRE(result);
  QAG_REQUIRE(out);
  if (app >= result->value.per_app.size()) {
    return fail(QAG_ERR_INVALID_ARGUMENT, "application index out of range");
  }
  return guarded([&] { *out = app_row(result->value, app); });
}

size_t qag_result_step_count(const qag_result* result) {
  return result ? result->value.tree.steps.size() : 0;
}

qag_status qag_result_step(const qag_result* result, size_t index, const char** bitstring,
                           const char** method, size_t* depth, size_t* trace_length) {
  QAG_REQUIRE(result);
  if (index >= result->value.tree.steps.size()) {
    return fail(QAG_ERR_INVALID_ARGUMENT, "partition step index out of range");
  }
  const auto& step = result->value.tree.steps[index];
  if (bitstring) *bitstring = step.bitstring.c_str();
  if (method) *method = qag::to_string(step.method);
  if (depth) *depth = step.depth;
  if (trace_length) *trace_length = step.trace.size();
  return QAG_OK;
}

qag_status qag_result_step_trace(const qag_result* result, size_t index, double* out,
                                 size_t capacity) {
  QAG_REQUIRE(result);
  if (index >= result->value.tree.steps.size()) {
    return fail(QAG_ERR_INVALID_ARGUMENT, "partition step index out of range");
  }
  const auto& trace = result->value.tree.steps[index].trace;
  if (capacity > 0) QAG_REQUIRE(out);
  for (std::size_t i = 0; i < trace.size() && i < capacity; ++i) out[i] = trace[i];
  return QAG_OK;
}

qag_status qag_result_format(const qag_result* result, const qag_scenario* scenario,
                             qag_format format, char** out) {
  QAG_REQUIRE(result);
  QAG_REQUIRE(scenario);
  QAG_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    to_format(format);
    *out = copy_out(format_result(result->value, scenario->value, format));
  });
}

qag_status qag_sweep_create(qag_sweep** out) {
  QAG_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto sweep = std::make_unique<qag_sweep>();
    sweep->spec.qaoa.qubit_budget = qag::default_qubit_budget();
    *out = sweep.release();
  });
}

void qag_sweep_free(qag_sweep* sweep) { delete sweep; }

qag_status qag_sweep_set_source(qag_sweep* sweep, const char* source, size_t sample_configs,
                                size_t sample_nodes) {
  QAG_REQUIRE(sweep);
  QAG_REQUIRE(source);
  return guarded([&] {
    sweep->spec.source.name = source;
    sweep->spec.source.sample_configs = sample_configs;
    sweep->spec.source.sample_nodes = sample_nodes;
  });
}

qag_status qag_sweep_set_schemes(qag_sweep* sweep, const qag_scheme* schemes, size_t count) {
  QAG_REQUIRE(sweep);
  if (count > 0) QAG_REQUIRE(schemes);
  return guarded([&] {
    std::vector<qag::Scheme> list;
    for (std::size_t i = 0; i < count; ++i) list.push_back(to_scheme(schemes[i]));
    sweep->spec.schemes = std::move(list);
  });
}

qag_status qag_sweep_set_grids(qag_sweep* sweep, const double* tau, size_t tau_count,
                               const double* loss, size_t loss_count) {
  QAG_REQUIRE(sweep);
  if (tau_count > 0) QAG_REQUIRE(tau);
  if (loss_count > 0) QAG_REQUIRE(loss);
  return guarded([&] {
    sweep->spec.tau_grid.assign(tau, tau + tau_count);
    sweep->spec.loss_grid.assign(loss, loss + loss_count);
  });
}

qag_status qag_sweep_set_iterations(qag_sweep* sweep, size_t iterations, uint64_t base_seed) {
  QAG_REQUIRE(sweep);
  sweep->spec.iterations = iterations;
  sweep->spec.base_seed = base_seed;
  return QAG_OK;
}

qag_status qag_sweep_set_options(qag_sweep* sweep, const qag_options* options) {
  QAG_REQUIRE(sweep);
  QAG_REQUIRE(options);
  return guarded([&] {
    sweep->spec.qaoa = to_qaoa(*options);
    sweep->spec.oracle_budget = options->oracle_budget;
  });
}

qag_status qag_sweep_set_timing(qag_sweep* sweep, int enabled) {
  QAG_REQUIRE(sweep);
  sweep->spec.timing = enabled != 0;
  return QAG_OK;
}

qag_status qag_sweep_run(qag_sweep* sweep) {
  QAG_REQUIRE(sweep);
  return guarded([&] { sweep->result = qag::run_sweep(sweep->spec); });
}

size_t qag_sweep_row_count(const qag_sweep* sweep) {
  return sweep ? sweep->result.rows.size() : 0;
}

qag_status qag_sweep_get_row(const qag_sweep* sweep, size_t index, qag_sweep_row* out) {
  QAG_REQUIRE(sweep);
  QAG_REQUIRE(out);
  if (index >= sweep->result.rows.size()) {
    return fail(QAG_ERR_INVALID_ARGUMENT, "sweep row index out of range");
  }
  const auto& r = sweep->result.rows[index];
  *out = qag_sweep_row{from_scheme(r.scheme), r.tau_max,  r.loss_max,   r.mean_energy_j,
                       r.ci95_j,              r.churn_rate, r.wall_time_s};
  return QAG_OK;
}

qag_status qag_sweep_format(const qag_sweep* sweep, qag_format format, char** out) {
  QAG_REQUIRE(sweep);
  QAG_REQUIRE(out);
  *out = nullptr;
  return guarded(
      [&] { *out = copy_out(qag::format_results(sweep->result, to_format(format))); });
}

qag_status qag_sweep_write(const qag_sweep* sweep, const char* path, qag_format format) {
  QAG_REQUIRE(sweep);
  QAG_REQUIRE(path);
  return guarded([&] { qag::emit_results(sweep->result, path, to_format(format)); });
}

}  // extern "C"
