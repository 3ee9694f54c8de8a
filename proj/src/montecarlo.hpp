#ifndef COVERT_MONTECARLO_HPP
#define COVERT_MONTECARLO_HPP

#include "analytic.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

// Sample-level Monte Carlo simulation of the link:
//
//   H1 (frame present):  r = sqrt(P_T) * s h^T + N      (per receiver)
//   H0 (noise only):     r = N
//
// with h an i.i.d. unit-variance circularly-symmetric complex Gaussian
// channel vector (fresh every trial), N i.i.d. complex Gaussian noise with
// per-sample variance sigma_n^2, and s the unit-modulus frame symbols. Bob
// observes the N_RS training rows and computes the normalized-projection
// statistic; Willie observes all N rows and computes the average-energy
// excess. Empirical rates come back with Wilson confidence intervals.
//
// Determinism: every random quantity is a pure function of
// (master seed, stream, trial, block) through a counter-based generator, so
// results are bit-identical for any thread count and any trial ordering.

namespace covert::mc {

struct ReferenceSequence {
    std::vector<std::complex<double>> symbols; // |symbols[k]| = 1
};

struct ChannelDraw {
    std::vector<std::complex<double>> gains; // M i.i.d. CN(0,1) entries
};

// Row-major (time x antenna) complex sample matrix.
struct ReceivedBlock {
    int rows = 0; // L: N_RS for Bob, N for Willie
    int cols = 0; // M
    std::vector<std::complex<double>> samples;

    std::complex<double>& at(int row, int col) { return samples[static_cast<std::size_t>(row) * cols + col]; }
    const std::complex<double>& at(int row, int col) const {
        return samples[static_cast<std::size_t>(row) * cols + col];
    }
};

struct TrialOutcome {
    double statistic = 0.0;      // Lambda_B in [0,1] (Bob) or energy excess T_W (Willie)
    bool decided_present = false;
};

struct EmpiricalRate {
    std::uint64_t events = 0;
    std::uint64_t trials = 0;
    double estimate = 0.0;
    double ci_low = 0.0;  // Wilson score interval at the configured confidence
    double ci_high = 0.0;
};

struct TrialPlan {
    std::uint64_t n_trials = 0;
    std::uint64_t master_seed = 0;
    double confidence_level = 0.99;
};

enum class Hypothesis { h0, h1 };

// --- building blocks ---

// Unit-modulus symbols with pseudo-random phases, deterministic in
// (n_rs, seed). The first n_rs entries of any longer sequence from the same
// seed coincide with this one (prefix property), so the training sequence is
// literally the frame's prefix.
ReferenceSequence gen_reference_sequence(int n_rs, std::uint64_t seed);

// Lambda_B = |s^H r|^2 / (N_RS * |r|_F^2) in [0, 1]. Throws for an all-zero
// block (0/0: probability-zero input treated as a domain violation).
double bob_statistic(const ReceivedBlock& block, const ReferenceSequence& s_rs);

// T_W = Tr(r^H r) / (M * N * noise_power) - 1; the radiometer decision is
// T_W > eta_w.
double willie_statistic(const ReceivedBlock& block, double noise_power);

// --- trial engines ---
// threads <= 0 means: COVERT_THREADS env var if set, else hardware
// concurrency. Results are bit-identical for every thread count.

// Under H0 the returned rate is the false-alarm rate P(Lambda_B > eta_b);
// under H1 it is the missed-detection rate P(Lambda_B <= eta_b) at
// params.tx_power (> 0 required).
EmpiricalRate run_bob_trials(const analytic::SystemParams& params,
                             const analytic::Thresholds& thresholds, Hypothesis hypothesis,
                             const TrialPlan& plan, int threads = 0);

// Under H0 the returned rate is the false-alarm rate P(T_W > eta_w); under H1
// it is the detection rate P(T_W > eta_w) with the full length-N frame.
EmpiricalRate run_willie_trials(const analytic::SystemParams& params,
                                const analytic::Thresholds& thresholds, Hypothesis hypothesis,
                                const TrialPlan& plan, int threads = 0);

// Per-trial statistics (for distribution-level tests: KS against the exact
// H0 laws). Same determinism guarantees as the rate engines.
std::vector<double> collect_bob_statistics(const analytic::SystemParams& params,
                                           Hypothesis hypothesis, const TrialPlan& plan,
                                           int threads = 0);
std::vector<double> collect_willie_statistics(const analytic::SystemParams& params,
                                              Hypothesis hypothesis, const TrialPlan& plan,
                                              int threads = 0);

// --- exact H0 oracles ---

// P(Lambda_B > eta_b) under H0, exactly: Lambda_B ~ Beta(m, m*(n_rs - 1)).
double bob_exact_fap_oracle(double eta_b, int m, int n_rs);

// P(T_W > eta_w) under H0, exactly: the total energy over m*n_total samples
// is Gamma(m*n_total, sigma_n^2).
double willie_exact_fap_oracle(double eta_w, int m, int n_total);

// --- statistics helpers ---

// Wilson score interval; confidence in (0,1).
EmpiricalRate make_empirical_rate(std::uint64_t events, std::uint64_t trials, double confidence);

// Two-sided Kolmogorov-Smirnov statistic sup |F_n - F| of `samples` against
// the CDF values `cdf(x)` (cdf must be a nondecreasing function object).
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic KS critical value at significance level `alpha` for n samples
// (c(alpha)/sqrt(n); c(0.01) = 1.62762).
double ks_critical_value(double significance, std::size_t n);

// Two-proportion z statistic (pooled); |z| beyond the normal quantile at the
// chosen significance rejects equality of rates.
double two_proportion_z(std::uint64_t events_a, std::uint64_t trials_a, std::uint64_t events_b,
                        std::uint64_t trials_b);

// Thread-count resolution used by the engines (exposed so the harness can
// report the effective value): threads <= 0 -> COVERT_THREADS env var if set,
// else std::thread::hardware_concurrency(), floored at 1.
int resolve_thread_count(int threads);

} // namespace covert::mc

#endif // COVERT_MONTECARLO_HPP
