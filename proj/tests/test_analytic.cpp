#include "doctest.h"

#include "analytic.hpp"
#include "errors.hpp"
#include "specfun.hpp"

#include <cmath>
#include <random>

using namespace covert::analytic;
namespace sf = covert::specfun;

namespace {
bool close_rel(double got, double want, double tol) {
    return std::fabs(got - want) <= tol * std::max(std::fabs(want), 1e-300);
}
} // namespace

TEST_CASE("bob_threshold closed form for one antenna") {
    // m = 1: gamma quantile is -ln(p_fa), so eta_b = -ln(p_fa) / n_rs.
    CHECK(bob_threshold(1e-3, 1, 100) ==
          doctest::Approx(0.06907755278982136).epsilon(1e-12));
}

TEST_CASE("bob_threshold calibrates bob_fap exactly") {
    for (const int m : {1, 4, 16, 64}) {
        for (const int n_rs : {8, 32, 128, 1024}) {
            for (const double p_fa : {0.2, 1e-2, 1e-4}) {
                const double eta = bob_threshold(p_fa, m, n_rs);
                CAPTURE(m);
                CAPTURE(n_rs);
                CAPTURE(p_fa);
                CHECK(close_rel(bob_fap(eta, m, n_rs), p_fa, 1e-10));
            }
        }
    }
}

TEST_CASE("bob_threshold saturation flag") {
    bool saturated = false;
    const double eta = bob_threshold(1e-9, 1, 4);
    (void)bob_threshold(1e-9, 1, 4, &saturated);
    CHECK(eta >= 1.0);
    CHECK(saturated);
    saturated = true;
    (void)bob_threshold(1e-3, 16, 128, &saturated);
    CHECK_FALSE(saturated);
    // At a saturated threshold the statistic (<= 1) can never fire: miss is
    // certain no matter the SNR.
    CHECK(bob_mdp(eta, 123.0, 1, 4) == 1.0);
}

TEST_CASE("bob_mdp equals the reduced law f_m at the calibrated threshold") {
    std::mt19937 gen(2718);
    std::uniform_int_distribution<int> m_dist(1, 64);
    std::uniform_int_distribution<int> n_dist(2, 512);
    std::uniform_real_distribution<double> log_pfa(std::log(1e-4), std::log(0.2));
    std::uniform_real_distribution<double> log_rho(std::log(1e-3), std::log(10.0));
    for (int i = 0; i < 20; ++i) {
        const int m = m_dist(gen);
        const int n_rs = n_dist(gen);
        const double p_fa = std::exp(log_pfa(gen));
        const double rho = std::exp(log_rho(gen));
        const double via_mdp = bob_mdp(bob_threshold(p_fa, m, n_rs), rho, m, n_rs);
        const double via_fm = f_m(1.0 / (rho * n_rs), m, p_fa);
        CAPTURE(m);
        CAPTURE(n_rs);
        CAPTURE(p_fa);
        CAPTURE(rho);
        CHECK(std::fabs(via_mdp - via_fm) < 1e-8);
    }
}

TEST_CASE("f_m frozen reference values") {
    // Computed independently with 30-digit arbitrary-precision quadrature.
    const struct {
        double x;
        int m;
        double p_fa;
        double want;
    } pts[] = {
        {0.1, 16, 1e-3, 1.2614436054785636e-07},
        {0.5, 16, 1e-3, 0.05387821884281459},
        {1.0, 4, 1e-2, 0.7554816350489688},
        {2.0, 1, 1e-3, 0.9981878121143608},
    };
    for (const auto& pt : pts) {
        CAPTURE(pt.x);
        CAPTURE(pt.m);
        const double got = f_m(pt.x, pt.m, pt.p_fa);
        CHECK(std::fabs(got - pt.want) < 1e-9 + 1e-9 * pt.want);
    }
}

TEST_CASE("f_m is strictly increasing in x") {
    for (const int m : {1, 16}) {
        double prev = -1.0;
        for (const double x :
             {0.01, 0.05, 0.1, 0.2, 0.4, 0.8, 1.2, 2.0, 4.0, 8.0, 32.0}) {
            const double p = f_m(x, m, 1e-3);
            CAPTURE(m);
            CAPTURE(x);
            CHECK(p > prev);
            prev = p;
        }
    }
}

TEST_CASE("f_m boundaries") {
    CHECK_THROWS_AS((void)f_m(0.0, 4, 1e-3), covert::domain_error);
    CHECK_THROWS_AS((void)f_m(-1.0, 4, 1e-3), covert::domain_error);
    // Extreme x: miss probability pinned to the [0,1] range.
    CHECK(f_m(1e-9, 16, 1e-3) >= 0.0);
    CHECK(f_m(1e9, 16, 1e-3) <= 1.0);
    CHECK(f_m(1e9, 16, 1e-3) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("f_m_inv roundtrips through f_m") {
    for (const int m : {1, 4, 16, 64}) {
        for (const double p : {1e-4, 1e-3, 1e-2, 0.1, 0.5, 0.9}) {
            const double x = f_m_inv(p, m, 1e-3);
            CAPTURE(m);
            CAPTURE(p);
            CHECK(close_rel(f_m(x, m, 1e-3), p, 1e-7));
        }
    }
    CHECK_THROWS_AS((void)f_m_inv(0.0, 4, 1e-3), covert::domain_error);
    CHECK_THROWS_AS((void)f_m_inv(1.0, 4, 1e-3), covert::domain_error);
}

TEST_CASE("f_m_inv frozen design scales x*(m) at p_fa = p_md = 1e-3") {
    const struct {
        int m;
        double want;
    } pts[] = {{4, 0.0331994017241},
               {16, 0.25776952540069165},
               {64, 0.931114113498},
               {256, 2.60903121981},
               {1024, 6.473323937}};
    for (const auto& pt : pts) {
        CAPTURE(pt.m);
        CHECK(close_rel(f_m_inv(1e-3, pt.m, 1e-3), pt.want, 1e-8));
    }
}

TEST_CASE("the large-antenna scale factor stays far from the normal-limit claim") {
    // If x*(m) followed the normal-limit scale m / (2 * Phi^{-1}(p_md)^2),
    // the ratio below would approach 1. It does not: frozen values document
    // the actual (non-converging, non-monotone) behavior.
    const double qinv = sf::std_normal_tail_inv(1e-3); // = -Phi^{-1}(1e-3)
    const struct {
        int m;
        double want;
    } pts[] = {{4, 0.1585}, {16, 0.3077}, {64, 0.2779}, {256, 0.1946}};
    for (const auto& pt : pts) {
        const double ratio =
            f_m_inv(1e-3, pt.m, 1e-3) * 2.0 * qinv * qinv / pt.m;
        CAPTURE(pt.m);
        CHECK(std::fabs(ratio - pt.want) < 5e-4);
        CHECK(ratio < 0.5); // nowhere near 1
    }
}

TEST_CASE("min_transmit_power frozen design point and scaling") {
    const double p = min_transmit_power(1e-3, 1e-3, 16, 128, 1.0);
    CHECK(close_rel(p, 0.03030808233772322, 1e-9));
    // Linear in the noise power.
    CHECK(close_rel(min_transmit_power(1e-3, 1e-3, 16, 128, 2.5), 2.5 * p, 1e-9));
    // Longer training at the same targets needs less power per sample.
    CHECK(min_transmit_power(1e-3, 1e-3, 16, 512, 1.0) < p);
}

TEST_CASE("willie threshold/fap/dp closed forms") {
    CHECK(willie_threshold(1e-3, 16, 256) ==
          doctest::Approx(0.04828487978387208).epsilon(1e-12));
    for (const double p_fa : {0.3, 1e-2, 1e-5}) {
        for (const int m : {1, 16}) {
            const double eta = willie_threshold(p_fa, m, 256);
            CHECK(close_rel(willie_fap(eta, m, 256), p_fa, 1e-10));
            // Zero SNR: detection degenerates to false alarm.
            CHECK(willie_dp(eta, 0.0, m, 256) == willie_fap(eta, m, 256));
            // Any positive SNR helps.
            CHECK(willie_dp(eta, 0.01, m, 256) > willie_fap(eta, m, 256));
        }
    }
}

TEST_CASE("willie_dp_design frozen values and lower bound") {
    CHECK(close_rel(willie_dp_design(1e-3, 1e-3, 16, 256, 0.5),
                    0.12496590234018945, 1e-8));
    CHECK(close_rel(willie_dp_design(1e-3, 1e-3, 16, 1024, 0.5),
                    0.016987272620714533, 1e-8));
    for (const int n : {64, 256, 1024, 4096}) {
        CHECK(willie_dp_design(1e-3, 1e-3, 16, n, 0.5) > 1e-3);
    }
}

TEST_CASE("willie_dp_taylor realizes the 1/sqrt(N) law exactly") {
    const double c =
        (willie_dp_taylor(1e-3, 1e-3, 16, 256, 0.5) - 1e-3) * std::sqrt(256.0);
    for (const int n : {1024, 4096, 65536}) {
        const double v =
            (willie_dp_taylor(1e-3, 1e-3, 16, n, 0.5) - 1e-3) * std::sqrt(double(n));
        CHECK(close_rel(v, c, 1e-12));
    }
}

TEST_CASE("design column approaches the taylor column at rate 1/N") {
    // Frozen log-log slope of |design - taylor| between N = 2^10 and 2^20.
    const double g_lo = std::fabs(willie_dp_design(1e-3, 1e-3, 16, 1 << 10, 0.5) -
                                  willie_dp_taylor(1e-3, 1e-3, 16, 1 << 10, 0.5));
    const double g_hi = std::fabs(willie_dp_design(1e-3, 1e-3, 16, 1 << 20, 0.5) -
                                  willie_dp_taylor(1e-3, 1e-3, 16, 1 << 20, 0.5));
    const double slope = (std::log(g_hi) - std::log(g_lo)) /
                         (std::log(double(1 << 20)) - std::log(double(1 << 10)));
    CHECK(slope == doctest::Approx(-1.1235).epsilon(0.005));
}

TEST_CASE("willie_dp_asymptotic depends on m and n only through their product") {
    const double a = willie_dp_asymptotic(1e-3, 1e-3, 4, 1024, 0.5);
    const double b = willie_dp_asymptotic(1e-3, 1e-3, 16, 256, 0.5);
    const double c = willie_dp_asymptotic(1e-3, 1e-3, 64, 64, 0.5);
    CHECK(close_rel(a, b, 1e-14));
    CHECK(close_rel(b, c, 1e-14));
}

TEST_CASE("design formulas validate alpha * n as an integer sequence length") {
    CHECK_THROWS_AS((void)willie_dp_design(1e-3, 1e-3, 16, 100, 0.3001),
                    covert::config_error);
    CHECK_NOTHROW((void)willie_dp_design(1e-3, 1e-3, 16, 100, 0.3));
    CHECK_NOTHROW((void)willie_dp_design(1e-3, 1e-3, 16, 64, 1.0));
    CHECK_THROWS_AS((void)willie_dp_design(1e-3, 1e-3, 16, 64, 0.0),
                    covert::config_error);
    CHECK_THROWS_AS((void)willie_dp_design(1e-3, 1e-3, 16, 64, 1.25),
                    covert::config_error);
}

TEST_CASE("mdp_integral limit behavior") {
    // A huge positive shift makes the normal factor 1: the integral is the
    // whole Gamma mass. A huge negative shift kills it.
    CHECK(mdp_integral({1e12, 1.0, 8}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mdp_integral({-1e12, 1.0, 8}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("SystemParams::validate rejects inconsistent scenarios") {
    SystemParams good;
    good.n_total = 256;
    good.n_rs = 128;
    good.m_antennas = 16;
    good.noise_power = 1.0;
    good.tx_power = 0.1;
    good.alpha = 0.5;
    CHECK_NOTHROW(good.validate());

    SystemParams p = good;
    p.alpha = 0.5000001;
    CHECK_THROWS_AS(p.validate(), covert::config_error);
    p = good;
    p.n_rs = 512;
    CHECK_THROWS_AS(p.validate(), covert::config_error);
    p = good;
    p.noise_power = 0.0;
    CHECK_THROWS_AS(p.validate(), covert::config_error);
    p = good;
    p.tx_power = -1.0;
    CHECK_THROWS_AS(p.validate(), covert::config_error);
    p = good;
    p.m_antennas = 0;
    CHECK_THROWS_AS(p.validate(), covert::config_error);
}

TEST_CASE("probability arguments outside (0,1) are rejected") {
    CHECK_THROWS_AS((void)bob_threshold(0.0, 4, 32), covert::domain_error);
    CHECK_THROWS_AS((void)bob_threshold(1.0, 4, 32), covert::domain_error);
    CHECK_THROWS_AS((void)willie_threshold(-0.1, 4, 32), covert::domain_error);
    CHECK_THROWS_AS((void)bob_mdp(0.5, -1.0, 4, 32), covert::domain_error);
    CHECK_THROWS_AS((void)bob_fap(-0.01, 4, 32), covert::domain_error);
}
