#ifndef HEATINV_H
#define HEATINV_H

/* C interface to libheatinv. All handles are opaque; every call returns a
 * status code and, on failure, leaves a message in hi_last_error(). */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hi_status {
    HI_OK = 0,
    HI_E_ARGUMENT = 1,
    HI_E_CONFIG = 2,
    HI_E_NUMERICAL = 3,
    HI_E_IO = 4,
    HI_E_INTERNAL = 5
} hi_status;

typedef struct hi_potential hi_potential;
typedef struct hi_config hi_config;
typedef struct hi_report hi_report;

/* Message of the last failed call on this thread ("" if none). */
const char* hi_last_error(void);
const char* hi_status_string(hi_status status);

hi_status hi_potential_create(const double* values, size_t n_nodes, hi_potential** out);
/* Whitelisted expression such as "1 + x" or "sin(2*pi*x)". */
hi_status hi_potential_from_expression(const char* expression, size_t n_nodes, hi_potential** out);
void hi_potential_destroy(hi_potential* q);
size_t hi_potential_size(const hi_potential* q);
hi_status hi_potential_values(const hi_potential* q, double* out);

/* phi(1,nu), phi'(1,nu) for -phi'' + q phi = nu phi, phi(0) = 0, phi'(0) = 1. */
hi_status hi_solve_phi(const hi_potential* q, double nu, double* phi_end, double* dphi_end);

/* First j_max Dirichlet (lambda) and Dirichlet-Neumann (mu) eigenvalues. */
hi_status hi_compute_spectra(const hi_potential* q, size_t j_max, double tol_root, double* lambda, double* mu);

/* q on n_nodes points from J pairs of eigenvalues; iterations may be NULL. */
hi_status hi_recover_potential(const double* lambda, const double* mu, size_t j_count, size_t n_nodes,
                               double tol_iter, double* q_out, size_t* iterations);

hi_status hi_config_create(hi_config** out);
void hi_config_destroy(hi_config* cfg);
hi_status hi_config_set(hi_config* cfg, const char* key, const char* value);
hi_status hi_config_load_file(hi_config* cfg, const char* path);
hi_status hi_config_validate(const hi_config* cfg);

/* command: forward, invert, roundtrip, nonuniqueness, plot-data.
 * report may be NULL when only the files are wanted. */
hi_status hi_run(const hi_config* cfg, const char* command, hi_report** report);

void hi_report_destroy(hi_report* report);
/* Text of report.txt; owned by the report. */
const char* hi_report_text(const hi_report* report);
/* Named scalar such as "error_max"; HI_E_ARGUMENT if absent. */
hi_status hi_report_metric(const hi_report* report, const char* name, double* value);
size_t hi_report_iterations(const hi_report* report);

#ifdef __cplusplus
}
#endif

#endif
