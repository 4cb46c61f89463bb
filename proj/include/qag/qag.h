/* C interface to the orchestration library.
 *
 * Every object is an opaque handle released with its *_free function. Calls
 * return a qag_status; on failure qag_last_error() describes the problem
 * (per thread, valid until the next failing call on that thread). Strings
 * returned through char** are owned by the caller and released with
 * qag_string_free. */
#ifndef QAG_QAG_H
#define QAG_QAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(QAG_BUILDING_LIBRARY)
#define QAG_API __declspec(dllexport)
#else
#define QAG_API __declspec(dllimport)
#endif
#else
#define QAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qag_status {
  QAG_OK = 0,
  QAG_ERR_INVALID_ARGUMENT = 1,
  QAG_ERR_PARSE = 2,
  QAG_ERR_VALIDATION = 3,
  QAG_ERR_VERSION = 4,
  QAG_ERR_BUDGET = 5,
  QAG_ERR_PARTITION = 6,
  QAG_ERR_IO = 7,
  QAG_ERR_INTERNAL = 100
} qag_status;

typedef enum qag_scheme { QAG_SCHEME_QAG = 0, QAG_SCHEME_OPT = 1, QAG_SCHEME_RNF = 2 } qag_scheme;

typedef enum qag_format { QAG_FORMAT_CSV = 0, QAG_FORMAT_JSON = 1 } qag_format;

typedef struct qag_scenario qag_scenario;
typedef struct qag_result qag_result;
typedef struct qag_sweep qag_sweep;

typedef struct qag_options {
  size_t layers;
  uint64_t shots;
  size_t max_iters;     /* optimizer iterations */
  size_t qubit_budget;  /* larger cut problems use the classical search */
  double oracle_budget; /* largest search space the exhaustive optimum accepts */
} qag_options;

typedef struct qag_app_row {
  int deployed;
  int feasible;
  size_t config; /* indices into the scenario lists, valid when deployed */
  size_t node;
  double rate_tops;
  double energy_j;
  double latency_s;
  double loss_pct;
} qag_app_row;

typedef struct qag_sweep_row {
  qag_scheme scheme;
  double tau_max;
  double loss_max;
  double mean_energy_j;
  double ci95_j;
  double churn_rate;
  double wall_time_s;
} qag_sweep_row;

QAG_API const char* qag_last_error(void);
QAG_API const char* qag_status_name(qag_status status);
QAG_API void qag_string_free(char* s);

/* Defaults; the qubit budget honours QAG_QUBIT_BUDGET. */
QAG_API qag_status qag_options_default(qag_options* out);

QAG_API qag_status qag_parse_scheme(const char* name, qag_scheme* out);
QAG_API const char* qag_scheme_name(qag_scheme scheme);
QAG_API qag_status qag_parse_format(const char* name, qag_format* out);

/* `source` is fixture:small, fixture:large, random:small or a file path;
 * `seed` only matters for the generated sources. */
QAG_API qag_status qag_scenario_open(const char* source, uint64_t seed, qag_scenario** out);
QAG_API qag_status qag_scenario_save(const qag_scenario* scenario, const char* path);
QAG_API void qag_scenario_free(qag_scenario* scenario);
QAG_API qag_status qag_scenario_set_targets(qag_scenario* scenario, double latency_max_s,
                                            double loss_max_pct);
QAG_API size_t qag_scenario_app_count(const qag_scenario* scenario);
QAG_API size_t qag_scenario_config_count(const qag_scenario* scenario);
QAG_API size_t qag_scenario_node_count(const qag_scenario* scenario);
/* Borrowed pointers, valid while the scenario lives; NULL when out of range. */
QAG_API const char* qag_scenario_app_id(const qag_scenario* scenario, size_t index);
QAG_API const char* qag_scenario_config_id(const qag_scenario* scenario, size_t index);
QAG_API const char* qag_scenario_node_id(const qag_scenario* scenario, size_t index);

/* Writes small.json and large.json (the large one generated from `seed`). */
QAG_API qag_status qag_write_fixtures(const char* directory, uint64_t seed);

QAG_API qag_status qag_solve(const qag_scenario* scenario, qag_scheme scheme,
                             const qag_options* options, uint64_t seed, qag_result** out);
QAG_API void qag_result_free(qag_result* result);
QAG_API size_t qag_result_app_count(const qag_result* result);
QAG_API size_t qag_result_churn_count(const qag_result* result);
QAG_API double qag_result_system_energy(const qag_result* result);
QAG_API qag_status qag_result_app(const qag_result* result, size_t app, qag_app_row* out);
/* Internal partition steps (QAG only), in pre-order. */
QAG_API size_t qag_result_step_count(const qag_result* result);
QAG_API qag_status qag_result_step(const qag_result* result, size_t index, const char** bitstring,
                                   const char** method, size_t* depth, size_t* trace_length);
/* Copies up to `capacity` entries of the step's best-so-far objective trace. */
QAG_API qag_status qag_result_step_trace(const qag_result* result, size_t index, double* out,
                                         size_t capacity);
/* Per-application table plus totals, as CSV or JSON. */
QAG_API qag_status qag_result_format(const qag_result* result, const qag_scenario* scenario,
                                     qag_format format, char** out);

QAG_API qag_status qag_sweep_create(qag_sweep** out);
QAG_API void qag_sweep_free(qag_sweep* sweep);
QAG_API qag_status qag_sweep_set_source(qag_sweep* sweep, const char* source,
                                        size_t sample_configs, size_t sample_nodes);
QAG_API qag_status qag_sweep_set_schemes(qag_sweep* sweep, const qag_scheme* schemes, size_t count);
QAG_API qag_status qag_sweep_set_grids(qag_sweep* sweep, const double* tau, size_t tau_count,
                                       const double* loss, size_t loss_count);
QAG_API qag_status qag_sweep_set_iterations(qag_sweep* sweep, size_t iterations,
                                            uint64_t base_seed);
QAG_API qag_status qag_sweep_set_options(qag_sweep* sweep, const qag_options* options);
QAG_API qag_status qag_sweep_set_timing(qag_sweep* sweep, int enabled);
QAG_API qag_status qag_sweep_run(qag_sweep* sweep);
QAG_API size_t qag_sweep_row_count(const qag_sweep* sweep);
QAG_API qag_status qag_sweep_get_row(const qag_sweep* sweep, size_t index, qag_sweep_row* out);
QAG_API qag_status qag_sweep_format(const qag_sweep* sweep, qag_format format, char** out);
QAG_API qag_status qag_sweep_write(const qag_sweep* sweep, const char* path, qag_format format);

#ifdef __cplusplus
}
#endif

#endif /* QAG_QAG_H */
