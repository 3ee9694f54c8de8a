#ifndef COVERT_ANALYTIC_HPP
#define COVERT_ANALYTIC_HPP

#include <cstdint>

// Closed-form performance and design expressions for the covert link:
//
//   Bob (intended receiver, M antennas) correlates the received training
//   block against the known length-N_RS reference sequence and compares the
//   normalized projection statistic against a threshold eta_b.
//   Willie (warden) runs a radiometer over the whole length-N frame and
//   compares the average-energy excess against a threshold eta_w.
//
// This module provides: the false-alarm-rate calibrated thresholds for both
// detectors, Bob's missed-detection probability (a one-dimensional integral
// of a Gamma density against a normal CDF, and its reduced form f_M together
// with the monotone inverse), the minimum transmit power meeting a
// (P_FA, P_MD) target at Bob, and Willie's detection probability in exact,
// first-order (1/sqrt(N)) and large-M asymptotic forms.
//
// All probabilities are linear-scale; SNR rho = tx_power / noise_power is
// linear as well. Functions are pure and thread-safe.

namespace covert::analytic {

// All scenario scalars for one operating point.
struct SystemParams {
    int n_total = 0;           // frame length N (samples)
    int n_rs = 0;              // reference-sequence length N_RS (samples)
    int m_antennas = 0;        // receive antennas M
    double noise_power = 1.0;  // sigma_n^2, linear
    double tx_power = 0.0;     // P_T, linear
    double alpha = 0.0;        // N_RS / N

    double rho() const { return tx_power / noise_power; }          // per-sample SNR
    double warden_sample_power() const { return tx_power + noise_power; }

    // Throws covert::config_error if any invariant is violated
    // (1 <= n_rs <= n_total, alpha == n_rs/n_total exactly, powers valid).
    void validate() const;
};

// Detector operating points and the false-alarm target they realize.
struct Thresholds {
    double eta_b = 0.0;     // Bob's normalized-projection threshold, in (0,1)
    double eta_w = 0.0;     // Willie's relative-energy-excess threshold, > 0
    double target_fap = 0.0;
};

// Parameters of the reduced missed-detection integrand
//   integral of Gamma(m,1)-pdf(z) * Phi((a_shift*x_arg - z)/sqrt(2*x_arg*z)) dz
// with a_shift = eta_b*m*n_rs - m and x_arg = 1/(rho*n_rs).
struct MdpIntegrandParams {
    double a_shift;
    double x_arg;
    int m_antennas;
};

// --- Bob (reference-sequence detector) ---

// Threshold achieving false-alarm probability p_fa:
// gamma_cdf_inv(1 - p_fa, m) / (m * n_rs). If the result is >= 1 the
// statistic (which lives in [0,1]) can never exceed it; *saturated is set
// accordingly when provided (missed detection is then certain).
double bob_threshold(double p_fa, int m, int n_rs, bool* saturated = nullptr);

// False-alarm probability at threshold eta_b: gamma upper tail at
// eta_b * m * n_rs with shape m.
double bob_fap(double eta_b, int m, int n_rs);

// Missed-detection probability at threshold eta_b and SNR rho > 0.
// Quadrature absolute error <= 1e-8. For eta_b >= 1 returns exactly 1.
double bob_mdp(double eta_b, double rho, int m, int n_rs);

// The reduced MDP law f_M(x) at x = 1/(rho*n_rs): strictly increasing in x,
// so it has a well-defined inverse. bob_mdp(bob_threshold(p_fa,m,n_rs),rho,
// m,n_rs) == f_m(1/(rho*n_rs), m, p_fa) by construction.
double f_m(double x, int m, double p_fa);

// x with f_m(x, m, p_fa) = p_md, via monotone bracketing + bisection to
// 1e-12 relative width. Throws covert::unachievable_error if no bracket
// exists below x = 2^60.
double f_m_inv(double p_md, int m, double p_fa);

// Minimum transmit power meeting (p_md, p_fa) at Bob:
// noise_power / (f_m_inv(p_md, m, p_fa) * n_rs).
double min_transmit_power(double p_md, double p_fa, int m, int n_rs, double noise_power);

// --- Willie (radiometer) ---

// Threshold achieving false-alarm probability p_fa: Qinv(p_fa)/sqrt(m*n).
double willie_threshold(double p_fa, int m, int n_total);

// False-alarm probability at threshold eta_w: Q(sqrt(m*n) * eta_w).
double willie_fap(double eta_w, int m, int n_total);

// Detection probability at threshold eta_w and SNR rho >= 0:
// Q(sqrt(m*n) * (eta_w - rho)).
double willie_dp(double eta_w, double rho, int m, int n_total);

// Detection probability when Alice transmits at exactly the minimum power
// for (p_fa, p_md) at Bob, with n_rs = alpha*n_total:
// Q(Qinv(p_fa) - sqrt(m) / (alpha * f_m_inv(p_md, m, p_fa) * sqrt(n))).
double willie_dp_design(double p_fa, double p_md, int m, int n_total, double alpha);

// First-order expansion of willie_dp_design around its large-N limit:
// p_fa + exp(-Qinv(p_fa)^2/2) * sqrt(m) / (alpha * f_m_inv * sqrt(2*pi*n)).
double willie_dp_taylor(double p_fa, double p_md, int m, int n_total, double alpha);

// Large-M closed form replacing f_m_inv by its normal-limit scale:
// Q(Qinv(p_fa) - 2*(Phi^{-1}(p_md))^2 / (alpha * sqrt(m*n))); depends on m
// and n_total only through the product m*n_total.
double willie_dp_asymptotic(double p_fa, double p_md, int m, int n_total, double alpha);

// Shared integral core for bob_mdp / f_m (exposed for white-box testing).
double mdp_integral(const MdpIntegrandParams& params);

} // namespace covert::analytic

#endif // COVERT_ANALYTIC_HPP
