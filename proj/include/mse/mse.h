/*===-- mse.h - C interface to the mse library ---------------------*- C -*-===*\
|*                                                                            *|
|* Opaque module handles, status codes and JSON-encoded results. Strings     *|
|* returned through out-parameters are owned by the caller and released with *|
|* mse_string_free. The last error message is kept per thread.               *|
|*                                                                            *|
\*===----------------------------------------------------------------------===*/

#ifndef MSE_C_API_H
#define MSE_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(MSE_BUILDING_LIBRARY)
#define MSE_API __attribute__((visibility("default")))
#else
#define MSE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mse_module mse_module;

typedef enum {
  MSE_OK = 0,
  MSE_ERR_PARSE = 1,
  MSE_ERR_INVALID = 2,
  MSE_ERR_ARGUMENT = 3,
  MSE_ERR_IO = 4,
  MSE_ERR_SOLVER = 5,
  MSE_ERR_INTERNAL = 6
} mse_status;

typedef enum { MSE_DFS = 0, MSE_BFS = 1 } mse_strategy;
typedef enum { MSE_BACKEND_SAT = 0, MSE_BACKEND_ENUM = 1 } mse_backend;

typedef enum {
  MSE_EXHAUSTED = 0,
  MSE_TIME_BUDGET = 1,
  MSE_PATH_BUDGET = 2,
  MSE_ABORTED = 3
} mse_termination;

typedef struct {
  mse_strategy strategy;
  int merge_states;
  int caching;
  mse_backend backend;
  unsigned enum_cap_bits;
  double max_time_seconds; /* 0: unlimited */
  uint64_t max_paths;      /* 0: unlimited */
  const char *dump_smt_dir; /* NULL: disabled */
} mse_run_options;

MSE_API const char *mse_version(void);
MSE_API const char *mse_last_error(void);
MSE_API void mse_string_free(char *s);

MSE_API mse_status mse_module_parse(const char *text, mse_module **out);
MSE_API mse_status mse_module_load(const char *path, mse_module **out);
MSE_API mse_status mse_module_benchmark(const char *name, unsigned size,
                                        unsigned bits, mse_module **out);
MSE_API void mse_module_free(mse_module *m);

MSE_API mse_status mse_module_print(const mse_module *m, char **text);
/* MSE_ERR_INVALID when diagnostics were found; they are returned as JSON. */
MSE_API mse_status mse_module_validate(const mse_module *m, char **diagnostics_json);

MSE_API mse_status mse_analyze(const mse_module *m, char **facts_json);
MSE_API mse_status mse_transform(const mse_module *m, const char *const *skip_locations,
                                 size_t num_skip, mse_module **out,
                                 char **report_json);

MSE_API void mse_run_options_init(mse_run_options *opts);
MSE_API mse_status mse_run(const mse_module *m, const mse_run_options *opts,
                           char **report_json, mse_termination *termination);
MSE_API mse_status mse_driver(const mse_module *m, const mse_run_options *opts,
                              unsigned max_iterations, char **state_json,
                              int *budget_exhausted);
MSE_API mse_status mse_compare(const char *const *benchmarks, size_t num_benchmarks,
                               const unsigned *sizes, size_t num_sizes,
                               const char *const *modes, size_t num_modes,
                               unsigned bits, const mse_run_options *opts,
                               unsigned jobs, char **matrix_json, char **table,
                               int *any_out_of_time);

/* Input JSON maps object names to arrays of element values. */
MSE_API mse_status mse_concrete_run(const mse_module *m, const char *input_json,
                                    char **result_json);

MSE_API mse_status mse_benchmark_list(char **list_json);

#ifdef __cplusplus
}
#endif

#endif
