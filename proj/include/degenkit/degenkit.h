#ifndef DEGENKIT_H
#define DEGENKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(DEGENKIT_BUILDING)
#define DK_API __attribute__((visibility("default")))
#else
#define DK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dk_status {
    DK_OK = 0,
    DK_ERR_INVALID_ARGUMENT = 1,
    DK_ERR_GRID_MISMATCH = 2,
    DK_ERR_PARSE = 3,
    DK_ERR_DOMAIN = 4,
    DK_ERR_CONFIG = 5,
    DK_ERR_NUMERIC = 6,
    DK_ERR_IO = 7,
    DK_ERR_INTERNAL = 8
} dk_status;

typedef struct dk_grid dk_grid;
typedef struct dk_function dk_function;
typedef struct dk_norm dk_norm;
typedef struct dk_expr dk_expr;
typedef struct dk_operator dk_operator;
typedef struct dk_report dk_report;

/* Message of the last failed call on this thread; "" if none. */
DK_API const char* dk_last_error(void);
DK_API const char* dk_status_name(dk_status status);
DK_API const char* dk_version(void);
/* Process exit status for a run outcome: 0 ok, 2 config/parse, 3 numeric/domain. */
DK_API int dk_exit_code(dk_status status);

/* Strings returned through char** out parameters are released with this. */
DK_API void dk_string_free(char* s);

/* grids */
DK_API dk_status dk_grid_uniform(size_t n, double total, dk_grid** out);
DK_API dk_status dk_grid_refine(const dk_grid* grid, dk_grid** out);
DK_API size_t dk_grid_size(const dk_grid* grid);
DK_API dk_status dk_grid_cell(const dk_grid* grid, size_t i, double* left, double* measure, double* representative);
DK_API double dk_grid_total_measure(const dk_grid* grid);
DK_API void dk_grid_free(dk_grid* grid);

/* grid functions: `count` must equal cells * dim, values cell-major */
DK_API dk_status dk_function_create(const dk_grid* grid, size_t dim, const double* values, size_t count,
                                    dk_function** out);
DK_API dk_status dk_function_values(const dk_function* f, const double** values, size_t* count);
DK_API size_t dk_function_dim(const dk_function* f);
DK_API void dk_function_free(dk_function* f);

/* norms; p may be INFINITY. young is an expression in t and u. */
DK_API dk_status dk_norm_lp(double p, dk_norm** out);
DK_API dk_status dk_norm_orlicz(const char* young, double t_max, dk_norm** out);
DK_API dk_status dk_norm_eval(const dk_function* f, const dk_norm* norm, double* out);
DK_API void dk_norm_free(dk_norm* norm);

/* expressions; vars lists the allowed variable letters, e.g. "tsuv" */
DK_API dk_status dk_expr_parse(const char* text, const char* vars, dk_expr** out);
DK_API dk_status dk_expr_eval(const dk_expr* e, const char* const* names, const double* values, size_t count,
                              double* out);
DK_API dk_status dk_expr_diff(const dk_expr* e, char var, dk_expr** out);
DK_API dk_status dk_expr_print(const dk_expr* e, char** out);
DK_API void dk_expr_free(dk_expr* e);

/* integral operators; NULL or "" leaves a kernel slot empty */
DK_API dk_status dk_operator_create(const char* k0, const char* k1, const char* k2, const dk_grid* grid,
                                    dk_operator** out);
DK_API dk_status dk_operator_eval_g(const dk_operator* op, const dk_function* x1, const dk_function* x2,
                                    dk_function** out);
DK_API dk_status dk_operator_eval_f(const dk_operator* op, const dk_function* x, dk_function** out);
DK_API void dk_operator_free(dk_operator* op);

/* config runs */
typedef struct dk_run_options {
    int has_seed;
    uint64_t seed;
    int has_grid_n;
    size_t grid_n;
    int has_refinements;
    int refinements;
} dk_run_options;

DK_API dk_status dk_run_config_file(const char* path, const dk_run_options* options, dk_report** out);
DK_API dk_status dk_run_config_json(const char* json_text, const dk_run_options* options, dk_report** out);
DK_API const char* dk_report_json(const dk_report* report);
DK_API const char* dk_report_csv(const dk_report* report);
DK_API const char* dk_report_verdict(const dk_report* report);
/* output paths named in the config, "" when absent */
DK_API const char* dk_report_default_path(const dk_report* report);
DK_API const char* dk_report_default_csv_path(const dk_report* report);
/* NULL or "" skips that file */
DK_API dk_status dk_report_write(const dk_report* report, const char* json_path, const char* csv_path);
DK_API void dk_report_free(dk_report* report);

/* one line per probe: name | anchor | required parameters */
DK_API const char* dk_list_probes(void);
DK_API size_t dk_probe_count(void);

#ifdef __cplusplus
}
#endif

#endif
