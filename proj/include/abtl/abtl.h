/* SPDX-License-Identifier: Apache-2.0 */
#ifndef ABTL_ABTL_H
#define ABTL_ABTL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef ABTL_BUILDING_LIBRARY
#    define ABTL_API __declspec(dllexport)
#  else
#    define ABTL_API __declspec(dllimport)
#  endif
#else
#  define ABTL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum abtl_status {
  ABTL_OK = 0,
  ABTL_E_INVALID_ARGUMENT = 1,
  ABTL_E_DIMENSION = 2,
  ABTL_E_SINGULAR_SHIFT = 3,
  ABTL_E_BREAKDOWN = 4,
  ABTL_E_DEFLATION = 5,
  ABTL_E_STRUCTURE_LOSS = 6,
  ABTL_E_SINGULAR_MASS = 7,
  ABTL_E_DEGENERATE = 8,
  ABTL_E_PARSE = 9,
  ABTL_E_IO = 10,
  ABTL_E_UNSUPPORTED = 11,
  ABTL_E_OUT_OF_MEMORY = 12,
  ABTL_E_INTERNAL = 13
} abtl_status;

/* Message of the last failed call on this thread; "" after success. */
ABTL_API const char* abtl_last_error(void);
ABTL_API const char* abtl_status_string(abtl_status status);

/* Full-order systems ------------------------------------------------------ */

typedef struct abtl_system abtl_system;

typedef struct abtl_system_info {
  int64_t order; /* n (number of degrees of freedom for second order) */
  int64_t ports;
  int second_order;
  int random_input;  /* B was drawn from the seed */
  int random_output; /* C was drawn from the seed */
} abtl_system_info;

ABTL_API abtl_status abtl_system_generate_fdm(int n0, int64_t ports, uint64_t seed, abtl_system** out);

/* b_path / c_path may be NULL; missing matrices are drawn uniformly on
 * [0, 1) from seed with `ports` columns (rows for C). */
ABTL_API abtl_status abtl_system_load_first_order(const char* a_path, const char* b_path, const char* c_path,
                                                  int64_t ports, uint64_t seed, abtl_system** out);
/* m_path may be NULL for M = I. */
ABTL_API abtl_status abtl_system_load_second_order(const char* m_path, const char* d_path, const char* k_path,
                                                   const char* b_path, const char* c_path, int64_t ports,
                                                   uint64_t seed, abtl_system** out);
ABTL_API abtl_status abtl_system_save(const abtl_system* sys, const char* directory);
ABTL_API abtl_status abtl_system_info_get(const abtl_system* sys, abtl_system_info* out);

/* H(s) at s = re + i im, written column-major as interleaved (re, im)
 * pairs into out[2 * ports * ports]. */
ABTL_API abtl_status abtl_system_transfer(const abtl_system* sys, double re, double im, double* out);
ABTL_API void abtl_system_free(abtl_system* sys);

/* Reduction --------------------------------------------------------------- */

typedef struct abtl_options {
  int64_t block_width;    /* s */
  int64_t max_iterations; /* m_max */
  double tol;             /* relative stopping tolerance, 0 runs to max_iterations */
  int hermite;            /* use the right shifts and directions on the left */
  double initial_shift;   /* sigma_1 = mu_1 */
} abtl_options;

ABTL_API void abtl_options_default(abtl_options* options);

typedef struct abtl_iteration {
  int64_t iteration; /* 1-based block index */
  double sigma_re, sigma_im;
  double mu_re, mu_im;
  double residual_right;
  double residual_left;
  double biorthogonality;
  double seconds; /* cumulative */
} abtl_iteration;

typedef void (*abtl_iteration_callback)(const abtl_iteration* record, void* user);

typedef struct abtl_model abtl_model;

typedef struct abtl_model_info {
  int64_t order;
  int64_t ports;
  int64_t iterations;
  int64_t block_width;
  int second_order;
  int converged;
  int exhausted; /* stopped early: the Krylov space was exhausted */
  int64_t history_length;
} abtl_model_info;

/* second_order != 0 keeps the second-order structure (needs a second-order
 * system). A second-order system reduced with second_order == 0 gives a
 * first-order model of its linearization. */
ABTL_API abtl_status abtl_reduce(const abtl_system* sys, const abtl_options* options, int second_order,
                                 abtl_iteration_callback callback, void* user, abtl_model** out);

ABTL_API abtl_status abtl_model_info_get(const abtl_model* model, abtl_model_info* out);
ABTL_API abtl_status abtl_model_history(const abtl_model* model, int64_t index, abtl_iteration* out);
ABTL_API abtl_status abtl_model_transfer(const abtl_model* model, double re, double im, double* out);
/* config_json may be NULL; it is stored verbatim in model.json. */
ABTL_API abtl_status abtl_model_save(const abtl_model* model, const char* directory, const char* config_json);
ABTL_API abtl_status abtl_model_load(const char* directory, abtl_model** out);
ABTL_API void abtl_model_free(abtl_model* model);

/* Evaluation -------------------------------------------------------------- */

typedef struct abtl_error_summary {
  double hinf_estimate; /* sampled, a lower bound of the true norm */
  int64_t count;
  int64_t skipped;
} abtl_error_summary;

/* Samples both models on count log-spaced points of [omega_min, omega_max]
 * along the imaginary axis. csv_path may be NULL. */
ABTL_API abtl_status abtl_evaluate(const abtl_system* sys, const abtl_model* model, double omega_min,
                                   double omega_max, int64_t count, const char* csv_path,
                                   abtl_error_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* ABTL_ABTL_H */
