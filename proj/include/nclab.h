/* C interface to the non-colliding Brownian motion library.
 *
 * All functions return a status code; results come back through out
 * parameters. Handles are opaque and must be released with the matching
 * destroy call. On any failure nclab_last_error() describes what went wrong
 * (thread-local storage).
 */
#ifndef NCLAB_H
#define NCLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int nclab_status;

#define NCLAB_OK 0
#define NCLAB_ERR_NUMERICAL 1   /* computation failed or an invariant broke */
#define NCLAB_ERR_CONFIG 2      /* malformed configuration or input file */
#define NCLAB_ERR_INVALID 3     /* bad argument (domain violation, null out) */

const char* nclab_version(void);
const char* nclab_last_error(void);

/* Caps the worker threads used by library parallel loops; <= 0 resets to the
 * hardware default. */
void nclab_set_max_threads(int threads);

/* ---- stateless numerics ------------------------------------------------ */

/* Heat kernel p_t(x, y); t > 0. */
nclab_status nclab_heat_kernel(double t, double x, double y, double* out);

/* Probability that n ordered particles at xs stay ordered up to time t
 * (n even). */
nclab_status nclab_survival_probability(double t, const double* xs, int n, double* out);

/* Pfaffian of an n x n skew-symmetric matrix given in row-major order
 * (n even). */
nclab_status nclab_pfaffian(const double* row_major, int n, double* out);

/* ---- the conditioned process ------------------------------------------- */

/* A process handle bundles the particle number, the horizon, and the ordered
 * observation times (the last one must equal the horizon). */
typedef struct nclab_process nclab_process;

nclab_status nclab_process_create(int n_particles, double horizon, const double* times,
                                  int n_times, nclab_process** out);
void nclab_process_destroy(nclab_process* process);

/* One-point correlation (density of particles) at observation slice
 * `slice` (1-based) and position x. */
nclab_status nclab_process_onepoint(const nclab_process* process, int slice, double x,
                                    double* out);

/* General multi-point correlation: points are (slice, position) pairs. */
nclab_status nclab_process_correlation(const nclab_process* process, int n_points,
                                       const int* slices, const double* positions, double* out);

/* ---- experiment driver -------------------------------------------------- */

/* Runs one of the experiment modes (density | correlate | characteristic |
 * simulate | verify) from a JSON config, writing CSV files into out_dir.
 * `threads` <= 0 keeps the current cap; pass has_seed = 0 to use the config
 * seed. The return value doubles as a process exit code. */
int nclab_run(const char* mode, const char* config_path, const char* out_dir, int threads,
              uint64_t seed, int has_seed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NCLAB_H */
