/* C interface to mpcore.
 *
 * Objects live in a library-owned table and are referenced by opaque 64-bit
 * handles. Every function returns a status code (MPCORE_OK on success) and
 * writes results through out-parameters; nothing unwinds into the caller.
 * After a failure, mpcore_last_error() describes it (per thread).
 *
 * Elements are addressed as (row, col); vectors use col = 0.
 */
#ifndef MPCORE_C_H
#define MPCORE_C_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MPCORE_API __declspec(dllexport)
#else
#define MPCORE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef uint64_t mpcore_handle;

enum mpcore_status {
  MPCORE_OK = 0,
  MPCORE_E_INVALID_HANDLE = 1,
  MPCORE_E_DIMENSION = 2,
  MPCORE_E_SINGULAR = 3,
  MPCORE_E_PARSE = 4,
  MPCORE_E_OVERFLOW = 5,
  MPCORE_E_INTERNAL = 6
};

enum mpcore_stop_reason {
  MPCORE_STOP_CONVERGED = 0,
  MPCORE_STOP_MAX_ITER = 1,
  MPCORE_STOP_STAGNATED = 2
};

/* Semantic version of this interface, e.g. "1.0.0". */
MPCORE_API const char* mpcore_version(void);
/* 1 when batch kernels take the lane path (MPCORE_SIMD=off turns it off). */
MPCORE_API int mpcore_simd_enabled(void);
/* Message for the last failed call on this thread ("" if none). */
MPCORE_API const char* mpcore_last_error(void);

/* k is the component count: 2, 3 or 4. New objects are zero-filled. */
MPCORE_API int mpcore_mc_matrix_new(int k, size_t rows, size_t cols, mpcore_handle* out);
MPCORE_API int mpcore_mc_vector_new(int k, size_t len, mpcore_handle* out);
/* Releases any handle kind. A second release reports MPCORE_E_INVALID_HANDLE. */
MPCORE_API int mpcore_release(mpcore_handle h);
/* Shape and component count of a matrix or vector (vectors have cols = 1). */
MPCORE_API int mpcore_mc_shape(mpcore_handle h, size_t* rows, size_t* cols, int* k);

/* Decimal or hex-float text, rounded to the nearest k-component value. */
MPCORE_API int mpcore_mc_set_element_from_decimal(mpcore_handle h, size_t row, size_t col,
                                                  const char* text);
/* Writes k binary64 components, most significant first; out_len >= k. */
MPCORE_API int mpcore_mc_get_element_components(mpcore_handle h, size_t row, size_t col,
                                                double* out, size_t out_len);
/* Sets an element from len >= k finite binary64 terms (renormalized). */
MPCORE_API int mpcore_mc_set_element_components(mpcore_handle h, size_t row, size_t col,
                                                const double* terms, size_t len);

/* Factors a square matrix in place; *piv_out receives a new pivot handle. */
MPCORE_API int mpcore_mc_lu_factor(mpcore_handle matrix, mpcore_handle* piv_out);
/* x := solution of A x = b using factors from mpcore_mc_lu_factor. b is not
 * modified; x may be the same handle as b. */
MPCORE_API int mpcore_mc_lu_solve(mpcore_handle lu, mpcore_handle piv, mpcore_handle b,
                                  mpcore_handle x);

/* Iterative refinement on matrix files (see the mpmat text format).
 * rtol/atol are decimal or hex text; NULL selects 1e-100 and 0. */
MPCORE_API int mpcore_mc_refine(const char* a_path, const char* b_path, int k, int long_bits,
                                const char* rtol, const char* atol, int max_iter,
                                mpcore_handle* report_out);
MPCORE_API int mpcore_report_iterations(mpcore_handle report, size_t* out);
MPCORE_API int mpcore_report_stop_reason(mpcore_handle report, int* out);
MPCORE_API int mpcore_report_solution_length(mpcore_handle report, size_t* out);
/* Exact hex-float text of solution element i. Writes at most buf_len bytes
 * including the terminator; *needed receives the full length + 1. A short
 * buffer gives MPCORE_E_DIMENSION. */
MPCORE_API int mpcore_report_solution_text(mpcore_handle report, size_t i, char* buf,
                                           size_t buf_len, size_t* needed);
MPCORE_API int mpcore_report_solution_binary64(mpcore_handle report, size_t i, double* out);
MPCORE_API int mpcore_report_residual_count(mpcore_handle report, size_t* out);
/* Residual norm i (0 = initial solution), rounded to binary64. */
MPCORE_API int mpcore_report_residual_binary64(mpcore_handle report, size_t i, double* out);

#ifdef __cplusplus
}
#endif

#endif /* MPCORE_C_H */
