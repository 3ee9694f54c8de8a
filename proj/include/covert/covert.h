/* covert.h — C API for the covert random-access link analyzer.
 *
 * The library evaluates closed-form detection/covertness expressions for a
 * frame-based random-access system (an M-antenna receiver running a GLRT
 * frame detector against an energy-detecting warden) and cross-checks them
 * with a sample-level Monte Carlo simulator under Rayleigh block fading.
 *
 * Conventions:
 *   - Every function returns a covert_status; outputs go through pointers.
 *   - On failure, covert_last_error() returns a thread-local message that is
 *     valid until the next failing call on the same thread.
 *   - Handles (covert_sweep, covert_results) are opaque; free them with the
 *     matching *_free function. Passing a foreign or freed pointer yields
 *     COVERT_ERR_INVALID_HANDLE (best effort; a magic tag is checked).
 *   - All probabilities are in [0,1]; powers are linear (not dB).
 */

#ifndef COVERT_H
#define COVERT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define COVERT_API __declspec(dllexport)
#else
#define COVERT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* ------------------------------------------------------------------ */
/* Status codes                                                        */
/* ------------------------------------------------------------------ */

typedef enum covert_status {
    COVERT_OK = 0,
    COVERT_ERR_DOMAIN = 1,       /* argument outside the mathematical domain  */
    COVERT_ERR_NUMERICAL = 2,    /* iteration/quadrature failed to converge   */
    COVERT_ERR_UNACHIEVABLE = 3, /* no parameter value can meet the target    */
    COVERT_ERR_CONFIG = 4,       /* inconsistent or malformed configuration   */
    COVERT_ERR_IO = 5,           /* file/stream failure                       */
    COVERT_ERR_INVALID_HANDLE = 6
} covert_status;

/* Library version, "major.minor.patch". Static storage; do not free. */
COVERT_API const char* covert_version(void);

/* Stable name for a status code ("ok", "domain", ...). Static storage. */
COVERT_API const char* covert_status_name(covert_status status);

/* Message for the most recent failing call on this thread ("" if none). */
COVERT_API const char* covert_last_error(void);

/* ------------------------------------------------------------------ */
/* Closed-form expressions                                             */
/* ------------------------------------------------------------------ */

/* GLRT threshold eta_b achieving false-alarm probability p_fa with m
 * antennas and an n_rs-sample reference sequence. May exceed 1 (saturated)
 * for tiny p_fa and short sequences; still returned, see covert_design_point
 * for the guarded variant. */
COVERT_API covert_status covert_bob_threshold(double p_fa, int32_t m, int32_t n_rs,
                                              double* out);

/* False-alarm probability of the GLRT at threshold eta_b. */
COVERT_API covert_status covert_bob_fap(double eta_b, int32_t m, int32_t n_rs, double* out);

/* Missed-detection probability of the GLRT at threshold eta_b and per-sample
 * SNR rho, averaged over Rayleigh fading. */
COVERT_API covert_status covert_bob_mdp(double eta_b, double rho, int32_t m, int32_t n_rs,
                                        double* out);

/* Missed-detection probability as a function of x = 1/(rho*n_rs), with the
 * threshold implied by the false-alarm target p_fa. Strictly increasing in x. */
COVERT_API covert_status covert_f_m(double x, int32_t m, double p_fa, double* out);

/* Inverse of covert_f_m in x for a fixed (m, p_fa). */
COVERT_API covert_status covert_f_m_inv(double p, int32_t m, double p_fa, double* out);

/* Minimum transmit power meeting the (p_fa, p_md) detection targets. */
COVERT_API covert_status covert_min_transmit_power(double p_md, double p_fa, int32_t m,
                                                   int32_t n_rs, double noise_power,
                                                   double* out);

/* Radiometer threshold eta_w giving the warden false-alarm probability p_fa
 * under the Gaussian approximation of the normalized energy statistic. */
COVERT_API covert_status covert_willie_threshold(double p_fa, int32_t m, int32_t n,
                                                 double* out);

/* Warden false-alarm probability at threshold eta_w (Gaussian approximation). */
COVERT_API covert_status covert_willie_fap(double eta_w, int32_t m, int32_t n, double* out);

/* Warden detection probability at threshold eta_w and average received SNR
 * rho (Gaussian approximation). */
COVERT_API covert_status covert_willie_dp(double eta_w, double rho, int32_t m, int32_t n,
                                          double* out);

/* Warden detection probability when the transmitter uses exactly the minimum
 * power meeting Bob's (p_fa, p_md) targets; alpha = n_rs/n is the fraction of
 * the frame spent on the reference sequence. */
COVERT_API covert_status covert_willie_dp_design(double p_fa, double p_md, int32_t m,
                                                 int32_t n, double alpha, double* out);

/* First-order (1/sqrt(n)) expansion of covert_willie_dp_design. */
COVERT_API covert_status covert_willie_dp_taylor(double p_fa, double p_md, int32_t m,
                                                 int32_t n, double alpha, double* out);

/* Large-(m*n) closed form of covert_willie_dp_design. */
COVERT_API covert_status covert_willie_dp_asymptotic(double p_fa, double p_md, int32_t m,
                                                     int32_t n, double alpha, double* out);

/* Exact finite-sample laws of the two H0 statistics (no Gaussian
 * approximation); used as references for the simulator. */
COVERT_API covert_status covert_bob_exact_fap(double eta_b, int32_t m, int32_t n_rs,
                                              double* out);
COVERT_API covert_status covert_willie_exact_fap(double eta_w, int32_t m, int32_t n,
                                                 double* out);

/* ------------------------------------------------------------------ */
/* Design points and simulation                                        */
/* ------------------------------------------------------------------ */

typedef struct covert_params {
    int32_t n_total;     /* frame length N (samples)                   */
    int32_t n_rs;        /* reference-sequence length N_RS             */
    int32_t m_antennas;  /* receive antennas M                         */
    double noise_power;  /* per-sample complex noise power sigma_n^2   */
    double tx_power;     /* per-sample transmit power P_T              */
    double alpha;        /* n_rs / n_total                             */
} covert_params;

typedef struct covert_design {
    covert_params params;
    double eta_b; /* GLRT threshold       */
    double eta_w; /* radiometer threshold */
} covert_design;

/* Resolve a complete operating point from detection targets: thresholds for
 * both detectors and the minimum transmit power meeting (p_fa, p_md).
 * alpha * n_total must be a positive integer. Fails with
 * COVERT_ERR_UNACHIEVABLE when the GLRT threshold saturates (eta_b >= 1). */
COVERT_API covert_status covert_design_point(double p_fa, double p_md, int32_t n_total,
                                             double alpha, int32_t m, double noise_power,
                                             covert_design* out);

typedef struct covert_sim_options {
    uint64_t n_trials;
    uint64_t seed;
    double confidence;  /* Wilson CI level, e.g. 0.99      */
    int32_t threads;    /* 0 = auto (COVERT_THREADS / cores) */
    int32_t hypothesis; /* 0 = signal absent, 1 = signal present */
} covert_sim_options;

typedef struct covert_empirical {
    uint64_t events;
    uint64_t trials;
    double estimate;
    double ci_low;
    double ci_high;
} covert_empirical;

/* Monte Carlo rate of the GLRT exceeding eta_b (hypothesis 0) or falling at
 * or below it (hypothesis 1): empirical false-alarm / missed-detection rate.
 * Deterministic in (params, eta_b, options): the same inputs give the same
 * counts for every thread count. */
COVERT_API covert_status covert_simulate_bob(const covert_params* params, double eta_b,
                                             const covert_sim_options* options,
                                             covert_empirical* out);

/* Monte Carlo rate of the radiometer exceeding eta_w under either
 * hypothesis: empirical false-alarm / detection rate. */
COVERT_API covert_status covert_simulate_willie(const covert_params* params, double eta_w,
                                                const covert_sim_options* options,
                                                covert_empirical* out);

/* ------------------------------------------------------------------ */
/* Sweeps                                                              */
/* ------------------------------------------------------------------ */

typedef struct covert_sweep covert_sweep;
typedef struct covert_results covert_results;

#define COVERT_SWEEP_FRAME_LENGTH 0 /* sweep N, a fixed   */
#define COVERT_SWEEP_ANTENNAS 1     /* sweep M, N fixed   */

/* A sweep starts from built-in defaults: N = 256, M = 16, alpha = 0.5,
 * noise_power = 1, p_fa = p_md = 1e-3, variable = frame length, values
 * {64, 128, ..., 8192}, analytic-only (no simulation). */
COVERT_API covert_sweep* covert_sweep_new(void);
COVERT_API void covert_sweep_free(covert_sweep* sweep);

COVERT_API covert_status covert_sweep_set_base(covert_sweep* sweep, int32_t n_total,
                                               int32_t m, double alpha, double noise_power,
                                               double p_fa, double p_md);
COVERT_API covert_status covert_sweep_set_variable(covert_sweep* sweep, int32_t variable);
COVERT_API covert_status covert_sweep_set_values(covert_sweep* sweep, const int32_t* values,
                                                 size_t count);

/* Attach Monte Carlo columns to every sweep point. */
COVERT_API covert_status covert_sweep_set_simulation(covert_sweep* sweep, uint64_t n_trials,
                                                     uint64_t seed, double confidence,
                                                     int32_t threads);

/* Force the transmit power instead of the per-point design power. */
COVERT_API covert_status covert_sweep_set_tx_power(covert_sweep* sweep, double tx_power);

/* Run the sweep. Per-point math failures are recorded in the row's "error"
 * column and do not abort the sweep; configuration errors fail the call. */
COVERT_API covert_status covert_sweep_run(covert_sweep* sweep, covert_results** out);

/* ------------------------------------------------------------------ */
/* Results                                                             */
/* ------------------------------------------------------------------ */

COVERT_API void covert_results_free(covert_results* results);

COVERT_API covert_status covert_results_rows(const covert_results* results, size_t* out);
COVERT_API covert_status covert_results_cols(const covert_results* results, size_t* out);

/* Column name; the pointer stays valid for the life of the results handle. */
COVERT_API covert_status covert_results_column_name(const covert_results* results, size_t col,
                                                    const char** out);

/* Numeric cell. Cells that were not computed (failed row, no simulation)
 * read as NaN. The trailing "error" column is not numeric; read it with
 * covert_results_row_error. */
COVERT_API covert_status covert_results_cell(const covert_results* results, size_t row,
                                             size_t col, double* out);

/* Error message for one row ("" for clean rows). Valid for the handle life. */
COVERT_API covert_status covert_results_row_error(const covert_results* results, size_t row,
                                                  const char** out);

/* Error class for one row (COVERT_OK for clean rows). The call itself
 * succeeds; *out carries the row's recorded failure kind. */
COVERT_API covert_status covert_results_row_status(const covert_results* results, size_t row,
                                                   covert_status* out);

/* Write the result table as CSV to a file. */
COVERT_API covert_status covert_results_to_csv(const covert_results* results,
                                               const char* path);

/* Render the result table as a CSV string; free it with covert_string_free. */
COVERT_API covert_status covert_results_format_csv(const covert_results* results, char** out);

COVERT_API void covert_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Self-check                                                          */
/* ------------------------------------------------------------------ */

/* Run the built-in verification suite (closed-form identities, simulator
 * cross-checks, determinism). Each finished check is passed to line_cb as a
 * one-line report (may be NULL). On return, *failures (if non-NULL) holds
 * the number of failing checks; the status is COVERT_OK even when checks
 * fail — inspect *failures. */
COVERT_API covert_status covert_selfcheck(void (*line_cb)(const char* line, void* ctx),
                                          void* ctx, int* failures);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* COVERT_H */
