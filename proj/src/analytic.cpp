#include "analytic.hpp"

#include "errors.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace covert::analytic {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

void check_probability(double p, const char* fn, const char* name) {
    if (!(p > 0.0 && p < 1.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s: %s must lie in (0,1), got %.17g", fn, name, p);
        throw domain_error(buf);
    }
}

void check_positive_count(int v, const char* fn, const char* name) {
    if (v < 1) {
        throw domain_error(std::string(fn) + ": " + name + " must be a positive integer, got " +
                           std::to_string(v));
    }
}

// Validates the (alpha, n_total) pair of the design-level warden formulas and
// returns n_rs = alpha * n_total, which must land on an integer.
int resolve_n_rs(double alpha, int n_total, const char* fn) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s: alpha must lie in (0,1], got %.17g", fn, alpha);
        throw config_error(buf);
    }
    const double exact = alpha * n_total;
    const double rounded = std::nearbyint(exact);
    if (std::fabs(exact - rounded) > 1e-9 * (std::fabs(exact) + 1.0) || rounded < 1.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%s: alpha * n_total = %.17g is not a positive integer "
                      "(reference length must be a whole number of samples)",
                      fn, exact);
        throw config_error(buf);
    }
    return static_cast<int>(rounded);
}

} // namespace

void SystemParams::validate() const {
    char buf[160];
    if (n_total < 1 || n_rs < 1 || n_rs > n_total) {
        std::snprintf(buf, sizeof buf,
                      "SystemParams: need 1 <= n_rs <= n_total, got n_rs = %d, n_total = %d",
                      n_rs, n_total);
        throw config_error(buf);
    }
    if (m_antennas < 1) {
        std::snprintf(buf, sizeof buf, "SystemParams: m_antennas must be >= 1, got %d",
                      m_antennas);
        throw config_error(buf);
    }
    if (!(noise_power > 0.0) || !(tx_power >= 0.0)) {
        std::snprintf(buf, sizeof buf,
                      "SystemParams: need noise_power > 0 and tx_power >= 0, got %.17g / %.17g",
                      noise_power, tx_power);
        throw config_error(buf);
    }
    if (alpha != static_cast<double>(n_rs) / static_cast<double>(n_total)) {
        std::snprintf(buf, sizeof buf,
                      "SystemParams: alpha = %.17g does not equal n_rs/n_total = %d/%d", alpha,
                      n_rs, n_total);
        throw config_error(buf);
    }
}

double mdp_integral(const MdpIntegrandParams& params) {
    const int m = params.m_antennas;
    const double a = params.a_shift;
    const double x = params.x_arg;
    const double lg = std::lgamma(static_cast<double>(m));
    const double ax = a * x;

    const auto integrand = [&](double z) {
        // Gamma(m,1) density times a normal CDF factor. At z = 0 the CDF
        // argument diverges; the removable limit is 1 for ax > 0, 0 for
        // ax < 0, 1/2 for ax = 0 (and the density itself vanishes for m >= 2).
        if (z <= 0.0) {
            const double density = (m == 1) ? 1.0 : 0.0;
            const double limit = ax > 0.0 ? 1.0 : (ax < 0.0 ? 0.0 : 0.5);
            return density * limit;
        }
        const double density = std::exp((m - 1) * std::log(z) - z - lg);
        return density * specfun::std_normal_cdf((ax - z) / std::sqrt(2.0 * x * z));
    };

    // Gamma(m,1) mass beyond m + 12*sqrt(m) + 40 is below 1e-14, and the CDF
    // factor is bounded by 1, so truncating there cannot cost more than the
    // residual mass.
    const double z_max = m + 12.0 * std::sqrt(static_cast<double>(m)) + 40.0;

    // For small a*x the CDF factor falls from 1 to 0 inside a boundary layer
    // near z = 0 (center a*x, width ~ sqrt(x*a*x)) that can be narrower than
    // any fixed panel of [0, z_max]; a single adaptive pass then samples only
    // past the layer and mistakes the integrand for zero (the m = 1 density
    // does not vanish at the origin, so the layer carries all the mass).
    // Integrating over a dyadic ladder of initial segments keeps every scale
    // down to z_max * 2^-40 visible to the error estimator.
    double value = 0.0;
    double abs_error = 0.0;
    double hi = z_max;
    for (int k = 0; k < 40 && hi > 0.0; ++k) {
        const double lo = (k == 39) ? 0.0 : hi * 0.5;
        const auto quad = quad::integrate_adaptive(integrand, lo, hi, 1e-10);
        value += quad.value;
        abs_error += quad.abs_error;
        hi = lo;
    }
    if (abs_error > 1e-8) {
        throw numerical_error("mdp_integral: accumulated quadrature error above 1e-8", value);
    }
    // Clamp the tiny negative/over-one excursions quadrature can produce.
    return std::fmin(1.0, std::fmax(0.0, value));
}

double bob_threshold(double p_fa, int m, int n_rs, bool* saturated) {
    check_probability(p_fa, "bob_threshold", "p_fa");
    check_positive_count(m, "bob_threshold", "m");
    check_positive_count(n_rs, "bob_threshold", "n_rs");
    const double eta = specfun::gamma_cdf_inv(1.0 - p_fa, m) / (static_cast<double>(m) * n_rs);
    if (saturated != nullptr) {
        // eta >= 1 puts the threshold above the statistic's support [0,1]:
        // the false-alarm target is met trivially but detection never fires.
        *saturated = eta >= 1.0;
    }
    return eta;
}

double bob_fap(double eta_b, int m, int n_rs) {
    check_positive_count(m, "bob_fap", "m");
    check_positive_count(n_rs, "bob_fap", "n_rs");
    if (eta_b < 0.0) {
        throw domain_error("bob_fap: eta_b must be nonnegative");
    }
    return specfun::gamma_tail(eta_b * m * n_rs, m);
}

double bob_mdp(double eta_b, double rho, int m, int n_rs) {
    check_positive_count(m, "bob_mdp", "m");
    check_positive_count(n_rs, "bob_mdp", "n_rs");
    if (!(rho > 0.0)) {
        throw domain_error("bob_mdp: rho must be positive");
    }
    if (!(eta_b > 0.0)) {
        throw domain_error("bob_mdp: eta_b must be positive");
    }
    if (eta_b >= 1.0) return 1.0; // statistic lives in [0,1]: certain miss
    const double a = eta_b * static_cast<double>(m) * n_rs - m;
    const double x = 1.0 / (rho * n_rs);
    return mdp_integral({a, x, m});
}

double f_m(double x, int m, double p_fa) {
    check_positive_count(m, "f_m", "m");
    check_probability(p_fa, "f_m", "p_fa");
    if (!(x > 0.0)) {
        throw domain_error("f_m: x must be positive");
    }
    const double a = specfun::gamma_cdf_inv(1.0 - p_fa, m) - m;
    return mdp_integral({a, x, m});
}

double f_m_inv(double p_md, int m, double p_fa) {
    check_positive_count(m, "f_m_inv", "m");
    check_probability(p_md, "f_m_inv", "p_md");
    check_probability(p_fa, "f_m_inv", "p_fa");

    const double a = specfun::gamma_cdf_inv(1.0 - p_fa, m) - m;
    const auto eval = [&](double x) { return mdp_integral({a, x, m}); };

    double lo = 1e-12;
    if (eval(lo) > p_md) {
        throw unachievable_error("f_m_inv: target below the achievable range at x = 1e-12");
    }
    double hi = 1.0;
    while (eval(hi) <= p_md) {
        hi *= 2.0;
        if (hi > 0x1p60) {
            throw unachievable_error(
                "f_m_inv: no bracket below 2^60 — requested missed-detection level unreachable");
        }
    }
    // f_M is strictly increasing, so plain bisection is exact and robust.
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (eval(mid) <= p_md) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double min_transmit_power(double p_md, double p_fa, int m, int n_rs, double noise_power) {
    check_positive_count(n_rs, "min_transmit_power", "n_rs");
    if (noise_power < 0.0) {
        throw domain_error("min_transmit_power: noise_power must be nonnegative");
    }
    if (noise_power == 0.0) return 0.0;
    return noise_power / (f_m_inv(p_md, m, p_fa) * n_rs);
}

double willie_threshold(double p_fa, int m, int n_total) {
    check_probability(p_fa, "willie_threshold", "p_fa");
    check_positive_count(m, "willie_threshold", "m");
    check_positive_count(n_total, "willie_threshold", "n_total");
    return specfun::std_normal_tail_inv(p_fa) /
           std::sqrt(static_cast<double>(m) * n_total);
}

double willie_fap(double eta_w, int m, int n_total) {
    check_positive_count(m, "willie_fap", "m");
    check_positive_count(n_total, "willie_fap", "n_total");
    return specfun::std_normal_tail(std::sqrt(static_cast<double>(m) * n_total) * eta_w);
}

double willie_dp(double eta_w, double rho, int m, int n_total) {
    check_positive_count(m, "willie_dp", "m");
    check_positive_count(n_total, "willie_dp", "n_total");
    if (rho < 0.0) {
        throw domain_error("willie_dp: rho must be nonnegative");
    }
    return specfun::std_normal_tail(std::sqrt(static_cast<double>(m) * n_total) *
                                    (eta_w - rho));
}

double willie_dp_design(double p_fa, double p_md, int m, int n_total, double alpha) {
    check_probability(p_fa, "willie_dp_design", "p_fa");
    check_probability(p_md, "willie_dp_design", "p_md");
    check_positive_count(m, "willie_dp_design", "m");
    check_positive_count(n_total, "willie_dp_design", "n_total");
    resolve_n_rs(alpha, n_total, "willie_dp_design");
    const double xstar = f_m_inv(p_md, m, p_fa);
    return specfun::std_normal_tail(
        specfun::std_normal_tail_inv(p_fa) -
        std::sqrt(static_cast<double>(m)) / (alpha * xstar * std::sqrt(static_cast<double>(n_total))));
}

double willie_dp_taylor(double p_fa, double p_md, int m, int n_total, double alpha) {
    check_probability(p_fa, "willie_dp_taylor", "p_fa");
    check_probability(p_md, "willie_dp_taylor", "p_md");
    check_positive_count(m, "willie_dp_taylor", "m");
    check_positive_count(n_total, "willie_dp_taylor", "n_total");
    resolve_n_rs(alpha, n_total, "willie_dp_taylor");
    const double q = specfun::std_normal_tail_inv(p_fa);
    const double xstar = f_m_inv(p_md, m, p_fa);
    return p_fa + std::exp(-0.5 * q * q) * std::sqrt(static_cast<double>(m)) /
                      (alpha * xstar * std::sqrt(two_pi * n_total));
}

double willie_dp_asymptotic(double p_fa, double p_md, int m, int n_total, double alpha) {
    check_probability(p_fa, "willie_dp_asymptotic", "p_fa");
    check_probability(p_md, "willie_dp_asymptotic", "p_md");
    check_positive_count(m, "willie_dp_asymptotic", "m");
    check_positive_count(n_total, "willie_dp_asymptotic", "n_total");
    resolve_n_rs(alpha, n_total, "willie_dp_asymptotic");
    // Phi^{-1}(p_md) = -Qinv(p_md); only its square enters.
    const double phi_inv_md = specfun::std_normal_tail_inv(p_md);
    return specfun::std_normal_tail(
        specfun::std_normal_tail_inv(p_fa) -
        2.0 * phi_inv_md * phi_inv_md /
            (alpha * std::sqrt(static_cast<double>(m) * n_total)));
}

} // namespace covert::analytic
