#ifndef COVERT_QUADRATURE_HPP
#define COVERT_QUADRATURE_HPP

#include "errors.hpp"

#include <cmath>
#include <utility>
#include <vector>

// Adaptive Gauss-Kronrod (G7, K15) quadrature on a finite interval. The
// 15-point Kronrod rule supplies the value, the embedded 7-point Gauss rule
// supplies an error estimate, and panels whose estimate exceeds the per-panel
// tolerance are bisected. Suited to the integrands here: a Gamma density
// times a bounded smooth factor.

namespace covert::quad {

struct result {
    double value;
    double abs_error; // sum of per-panel |K15 - G7| estimates
    int panels;       // number of accepted panels
};

namespace detail {

// QUADPACK dqk15 abscissae/weights on [-1, 1]; even-index points form the
// embedded Gauss rule.
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
std::pair<double, double> kronrod_panel(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double k15 = wgk[7] * fc;
    double g7 = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        const double fsum = f(center - dx) + f(center + dx);
        k15 += wgk[j] * fsum;
        if (j % 2 == 1) g7 += wg[j / 2] * fsum;
    }
    k15 *= half;
    g7 *= half;
    return {k15, std::fabs(k15 - g7)};
}

} // namespace detail

// Integrates f over [a, b]; every accepted panel satisfies the per-panel
// absolute tolerance. Throws covert::numerical_error carrying the estimate
// reached so far if the panel budget is exhausted before convergence.
template <typename F>
result integrate_adaptive(F&& f, double a, double b, double panel_abs_tol,
                          int max_panels = 2000) {
    struct interval {
        double a, b;
    };
    std::vector<interval> stack{{a, b}};
    double value = 0.0;
    double err = 0.0;
    int accepted = 0;
    int splits = 0;
    while (!stack.empty()) {
        const interval iv = stack.back();
        stack.pop_back();
        const auto [panel_value, panel_err] = detail::kronrod_panel(f, iv.a, iv.b);
        if (panel_err <= panel_abs_tol || (iv.b - iv.a) <= 1e-14 * (std::fabs(iv.a) + 1.0)) {
            value += panel_value;
            err += panel_err;
            ++accepted;
            continue;
        }
        if (++splits > max_panels) {
            throw numerical_error("quadrature: panel budget exhausted before reaching tolerance",
                                  value + panel_value);
        }
        const double mid = 0.5 * (iv.a + iv.b);
        stack.push_back({iv.a, mid});
        stack.push_back({mid, iv.b});
    }
    return {value, err, accepted};
}

} // namespace covert::quad

#endif // COVERT_QUADRATURE_HPP
