#include "harness.hpp"

#include "errors.hpp"
#include "philox.hpp"
#include "specfun.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace covert::harness {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

bool is_absent(double v) { return std::isnan(v); }

std::string fmt_double(double v) {
    if (is_absent(v)) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v); // 17 significant digits: round-trip exact
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Derives the master seed for one (row, rate) empirical run so that rows and
// rates consume disjoint, reproducible randomness from one user-facing seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t row, std::uint64_t rate) {
    return rng::splitmix64(rng::splitmix64(master) ^
                           (0x9E3779B97F4A7C15ull * (row * 4 + rate + 1)));
}

void fill_analytic(ResultRow& row) {
    row.bob_fap = analytic::bob_fap(row.eta_b, row.m_antennas, row.n_rs);
    row.bob_mdp = analytic::bob_mdp(row.eta_b, row.rho, row.m_antennas, row.n_rs);
    row.willie_fap = analytic::willie_fap(row.eta_w, row.m_antennas, row.n_total);
    row.willie_dp_design =
        analytic::willie_dp_design(row.p_fa, row.p_md, row.m_antennas, row.n_total, row.alpha);
    row.willie_dp_taylor =
        analytic::willie_dp_taylor(row.p_fa, row.p_md, row.m_antennas, row.n_total, row.alpha);
    row.willie_dp_asymptotic = analytic::willie_dp_asymptotic(row.p_fa, row.p_md, row.m_antennas,
                                                              row.n_total, row.alpha);
    row.bob_fap_oracle = mc::bob_exact_fap_oracle(row.eta_b, row.m_antennas, row.n_rs);
    row.willie_fap_oracle = mc::willie_exact_fap_oracle(row.eta_w, row.m_antennas, row.n_total);
}

void fill_empirical(ResultRow& row, const analytic::SystemParams& params,
                    const analytic::Thresholds& thresholds, const mc::TrialPlan& plan,
                    std::uint64_t row_index, int threads) {
    const auto sub_plan = [&](std::uint64_t rate) {
        mc::TrialPlan p = plan;
        p.master_seed = derive_seed(plan.master_seed, row_index, rate);
        return p;
    };
    const auto bob_fap =
        mc::run_bob_trials(params, thresholds, mc::Hypothesis::h0, sub_plan(0), threads);
    const auto bob_mdp =
        mc::run_bob_trials(params, thresholds, mc::Hypothesis::h1, sub_plan(1), threads);
    const auto willie_fap =
        mc::run_willie_trials(params, thresholds, mc::Hypothesis::h0, sub_plan(2), threads);
    const auto willie_dp =
        mc::run_willie_trials(params, thresholds, mc::Hypothesis::h1, sub_plan(3), threads);
    row.bob_fap_emp = bob_fap.estimate;
    row.bob_fap_ci_low = bob_fap.ci_low;
    row.bob_fap_ci_high = bob_fap.ci_high;
    row.bob_mdp_emp = bob_mdp.estimate;
    row.bob_mdp_ci_low = bob_mdp.ci_low;
    row.bob_mdp_ci_high = bob_mdp.ci_high;
    row.willie_fap_emp = willie_fap.estimate;
    row.willie_fap_ci_low = willie_fap.ci_low;
    row.willie_fap_ci_high = willie_fap.ci_high;
    row.willie_dp_emp = willie_dp.estimate;
    row.willie_dp_ci_low = willie_dp.ci_low;
    row.willie_dp_ci_high = willie_dp.ci_high;
    row.trials = plan.n_trials;
    row.seed = plan.master_seed;
}

void recheck_row(const ResultRow& row, std::size_t index) {
    const auto fail = [&](const std::string& what) {
        throw config_error("emit_csv: row " + std::to_string(index) +
                           " violates a derivation invariant: " + what);
    };
    const auto rel_close = [](double a, double b, double tol) {
        return std::fabs(a - b) <= tol * std::max({std::fabs(a), std::fabs(b), 1e-300});
    };
    if (row.alpha != static_cast<double>(row.n_rs) / row.n_total) {
        fail("alpha != n_rs / n_total");
    }
    if (!rel_close(row.eta_b, analytic::bob_threshold(row.p_fa, row.m_antennas, row.n_rs),
                   1e-12)) {
        fail("eta_b does not derive from p_fa");
    }
    if (!rel_close(row.eta_w, analytic::willie_threshold(row.p_fa, row.m_antennas, row.n_total),
                   1e-12)) {
        fail("eta_w does not derive from p_fa");
    }
    if (!rel_close(row.rho, row.tx_power / row.noise_power, 1e-12)) {
        fail("rho != tx_power / noise_power");
    }
    if (!row.tx_overridden &&
        !rel_close(row.tx_power,
                   analytic::min_transmit_power(row.p_md, row.p_fa, row.m_antennas, row.n_rs,
                                                row.noise_power),
                   1e-9)) {
        fail("tx_power is not the design power (and no override was recorded)");
    }
}

void write_row(std::ostream& out, const ResultRow& row) {
    char intbuf[32];
    const auto put_int = [&](long long v) {
        std::snprintf(intbuf, sizeof intbuf, "%lld", v);
        out << intbuf;
    };
    put_int(row.n_total);
    out << ',';
    put_int(row.n_rs);
    out << ',' << fmt_double(row.alpha) << ',';
    put_int(row.m_antennas);
    out << ',' << fmt_double(row.noise_power) << ',' << fmt_double(row.tx_power) << ','
        << fmt_double(row.rho) << ',' << fmt_double(row.p_fa) << ',' << fmt_double(row.p_md)
        << ',' << fmt_double(row.eta_b) << ',' << fmt_double(row.eta_w) << ','
        << fmt_double(row.bob_fap) << ',' << fmt_double(row.bob_mdp) << ','
        << fmt_double(row.willie_fap) << ',' << fmt_double(row.willie_dp_design) << ','
        << fmt_double(row.willie_dp_taylor) << ',' << fmt_double(row.willie_dp_asymptotic)
        << ',' << fmt_double(row.bob_fap_oracle) << ',' << fmt_double(row.willie_fap_oracle)
        << ',' << fmt_double(row.bob_fap_emp) << ',' << fmt_double(row.bob_fap_ci_low) << ','
        << fmt_double(row.bob_fap_ci_high) << ',' << fmt_double(row.bob_mdp_emp) << ','
        << fmt_double(row.bob_mdp_ci_low) << ',' << fmt_double(row.bob_mdp_ci_high) << ','
        << fmt_double(row.willie_fap_emp) << ',' << fmt_double(row.willie_fap_ci_low) << ','
        << fmt_double(row.willie_fap_ci_high) << ',' << fmt_double(row.willie_dp_emp) << ','
        << fmt_double(row.willie_dp_ci_low) << ',' << fmt_double(row.willie_dp_ci_high) << ',';
    if (row.trials > 0) {
        std::snprintf(intbuf, sizeof intbuf, "%llu", static_cast<unsigned long long>(row.trials));
        out << intbuf << ',';
        std::snprintf(intbuf, sizeof intbuf, "%llu", static_cast<unsigned long long>(row.seed));
        out << intbuf << ',';
    } else {
        out << ",,";
    }
    out << csv_escape(row.error) << '\n';
}

} // namespace

ResultRow::ResultRow()
    : alpha(nan_v), noise_power(nan_v), tx_power(nan_v), rho(nan_v), p_fa(nan_v), p_md(nan_v),
      eta_b(nan_v), eta_w(nan_v), bob_fap(nan_v), bob_mdp(nan_v), willie_fap(nan_v),
      willie_dp_design(nan_v), willie_dp_taylor(nan_v), willie_dp_asymptotic(nan_v),
      bob_fap_oracle(nan_v), willie_fap_oracle(nan_v), bob_fap_emp(nan_v),
      bob_fap_ci_low(nan_v), bob_fap_ci_high(nan_v), bob_mdp_emp(nan_v), bob_mdp_ci_low(nan_v),
      bob_mdp_ci_high(nan_v), willie_fap_emp(nan_v), willie_fap_ci_low(nan_v),
      willie_fap_ci_high(nan_v), willie_dp_emp(nan_v), willie_dp_ci_low(nan_v),
      willie_dp_ci_high(nan_v) {}

const std::vector<std::string>& result_columns() {
    static const std::vector<std::string> cols = {
        "n_total", "n_rs", "alpha", "m_antennas", "noise_power", "tx_power", "rho", "p_fa",
        "p_md", "eta_b", "eta_w", "bob_fap", "bob_mdp", "willie_fap", "willie_dp_design",
        "willie_dp_taylor", "willie_dp_asymptotic", "bob_fap_oracle", "willie_fap_oracle",
        "bob_fap_emp", "bob_fap_ci_low", "bob_fap_ci_high", "bob_mdp_emp", "bob_mdp_ci_low",
        "bob_mdp_ci_high", "willie_fap_emp", "willie_fap_ci_low", "willie_fap_ci_high",
        "willie_dp_emp", "willie_dp_ci_low", "willie_dp_ci_high", "trials", "seed", "error"};
    return cols;
}

std::pair<analytic::SystemParams, analytic::Thresholds>
design_point(const DetectionTargets& targets, int n_total, double alpha, int m,
             double noise_power) {
    if (n_total < 1 || m < 1) {
        throw config_error("design_point: n_total and m must be positive integers");
    }
    if (!(noise_power > 0.0)) {
        throw config_error("design_point: noise_power must be positive");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw config_error("design_point: alpha must lie in (0,1]");
    }
    const double exact = alpha * n_total;
    const double rounded = std::nearbyint(exact);
    if (std::fabs(exact - rounded) > 1e-9 * (std::fabs(exact) + 1.0) || rounded < 1.0) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "design_point: alpha * n_total = %.17g is not a positive integer", exact);
        throw config_error(buf);
    }
    const int n_rs = static_cast<int>(rounded);

    bool saturated = false;
    analytic::Thresholds thresholds;
    thresholds.eta_b = analytic::bob_threshold(targets.p_fa, m, n_rs, &saturated);
    if (saturated) {
        throw unachievable_error(
            "design_point: Bob's threshold saturates (eta_b >= 1) — the reference sequence is "
            "too short for the requested false-alarm target, so the missed-detection target "
            "cannot be met at any power");
    }
    thresholds.eta_w = analytic::willie_threshold(targets.p_fa, m, n_total);
    thresholds.target_fap = targets.p_fa;

    analytic::SystemParams params;
    params.n_total = n_total;
    params.n_rs = n_rs;
    params.m_antennas = m;
    params.noise_power = noise_power;
    params.tx_power =
        analytic::min_transmit_power(targets.p_md, targets.p_fa, m, n_rs, noise_power);
    params.alpha = static_cast<double>(n_rs) / n_total;
    params.validate();
    return {params, thresholds};
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) {
        throw config_error("run_sweep: values must be nonempty");
    }
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        if (spec.values[i] < 1) {
            throw config_error("run_sweep: swept values must be positive integers");
        }
        if (i > 0 && spec.values[i] <= spec.values[i - 1]) {
            throw config_error("run_sweep: swept values must be strictly ascending");
        }
    }
    if (spec.plan) {
        if (spec.plan->n_trials < 1) {
            throw config_error("run_sweep: trial plan must request at least one trial");
        }
        if (!(spec.plan->confidence_level > 0.0 && spec.plan->confidence_level < 1.0)) {
            throw config_error("run_sweep: confidence level must lie in (0,1)");
        }
    }

    std::vector<ResultRow> rows;
    rows.reserve(spec.values.size());
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
        const bool sweep_n = spec.swept_variable == SweepSpec::Variable::frame_length_n;
        const int n_total = sweep_n ? spec.values[i] : spec.n_total;
        const int m = sweep_n ? spec.m_antennas : spec.values[i];

        ResultRow row;
        row.n_total = n_total;
        row.m_antennas = m;
        row.p_fa = spec.targets.p_fa;
        row.p_md = spec.targets.p_md;
        row.noise_power = spec.noise_power;
        try {
            auto [params, thresholds] =
                design_point(spec.targets, n_total, spec.alpha, m, spec.noise_power);
            if (spec.tx_power_override) {
                params.tx_power = *spec.tx_power_override;
                row.tx_overridden = true;
            }
            row.n_rs = params.n_rs;
            row.alpha = params.alpha;
            row.tx_power = params.tx_power;
            row.rho = params.rho();
            row.eta_b = thresholds.eta_b;
            row.eta_w = thresholds.eta_w;
            fill_analytic(row);
            if (spec.plan) {
                fill_empirical(row, params, thresholds, *spec.plan, i, spec.threads);
            }
        } catch (const error& e) {
            row.error = e.what();
            row.error_code = e.code();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].error.empty()) recheck_row(rows[i], i);
    }
    const auto& cols = result_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << cols[c] << (c + 1 < cols.size() ? "," : "\n");
    }
    for (const auto& row : rows) write_row(out, row);
    if (!out.good()) {
        throw io_error("emit_csv: stream write failed");
    }
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("emit_csv: cannot open '" + path + "' for writing");
    }
    emit_csv(rows, out);
    out.flush();
    if (!out.good()) {
        throw io_error("emit_csv: write to '" + path + "' failed");
    }
}

std::string format_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream out;
    emit_csv(rows, out);
    return out.str();
}

// ---------------------------------------------------------------------------
// selfcheck
// ---------------------------------------------------------------------------

namespace {

namespace sf = covert::specfun;
namespace an = covert::analytic;

// Small deterministic uniform source for the randomized checks.
struct check_rng {
    rng::counter_stream stream;
    explicit check_rng(std::uint64_t seed) : stream(seed, 3, 0) {}
    double uniform() { return stream.next_unit(); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(uniform() * (hi - lo + 1 - 1e-12));
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
};

std::string check_pass() { return {}; }

std::string failf(const char* fmt, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, fmt, a, b);
    return buf;
}

// e^{-x} * sum_{k<m} x^k/k!, the closed-form Gamma(m,1) lower CDF complement
// for integer m, via a stable term recurrence.
double poisson_sum_gamma_cdf(double x, int m) {
    double term = std::exp(-x);
    double sum = term;
    for (int k = 1; k < m; ++k) {
        term *= x / k;
        sum += term;
    }
    return 1.0 - sum;
}

struct check_runner {
    const std::function<void(const std::string&)>& report;
    int failures = 0;

    void operator()(const char* name, const std::function<std::string()>& body) {
        std::string detail;
        try {
            detail = body();
        } catch (const std::exception& e) {
            detail = std::string("unexpected exception: ") + e.what();
        }
        if (detail.empty()) {
            report(std::string("ok   ") + name);
        } else {
            ++failures;
            report(std::string("FAIL ") + name + " — " + detail);
        }
    }
};

} // namespace

int selfcheck(const std::function<void(const std::string&)>& report) {
    check_runner check{report};

    check("normal-cdf-basics", [] {
        if (std::fabs(sf::std_normal_cdf(0.0) - 0.5) > 1e-15) return std::string("Phi(0) != 1/2");
        if (std::fabs(sf::std_normal_cdf(1.959964) - 0.975) > 1e-6) {
            return failf("Phi(1.959964) = %.12g (want %.12g)", sf::std_normal_cdf(1.959964),
                         0.975);
        }
        for (const double x : {0.5, 2.0, 5.0}) {
            if (std::fabs(sf::std_normal_cdf(x) + sf::std_normal_cdf(-x) - 1.0) > 1e-13) {
                return failf("reflection identity broken at x = %g (err %g)", x,
                             sf::std_normal_cdf(x) + sf::std_normal_cdf(-x) - 1.0);
            }
        }
        return check_pass();
    });

    check("normal-tail-basics", [] {
        if (std::fabs(sf::std_normal_tail(0.0) - 0.5) > 1e-15) return std::string("Q(0) != 1/2");
        if (std::fabs(sf::std_normal_tail(3.090232) - 1e-3) > 1e-6) {
            return failf("Q(3.090232) = %.12g (want %.12g)", sf::std_normal_tail(3.090232), 1e-3);
        }
        if (std::fabs(sf::std_normal_tail(1.7) + sf::std_normal_tail(-1.7) - 1.0) > 1e-13) {
            return std::string("Q reflection identity broken at x = 1.7");
        }
        const double x = sf::std_normal_tail_inv(sf::std_normal_tail(2.0));
        if (std::fabs(x - 2.0) > 1e-9) return failf("roundtrip at 2.0 gave %.12g (err %g)", x, x - 2.0);
        return check_pass();
    });

    check("normal-cdf-monotone", [] {
        double prev = -1.0;
        for (int i = 0; i <= 10000; ++i) {
            const double x = -8.0 + 16.0 * i / 10000.0;
            const double p = sf::std_normal_cdf(x);
            if (p < prev) return failf("local inversion at x = %g (drop %g)", x, prev - p);
            prev = p;
        }
        return check_pass();
    });

    check("normal-tail-asymptotic", [] {
        for (const double x : {6.0, 7.0, 8.0}) {
            const double ratio = sf::std_normal_tail(x) * std::exp(0.5 * x * x) * x *
                                 std::sqrt(6.283185307179586);
            if (std::fabs(ratio - 1.0) > 0.05) {
                return failf("tail/asymptote ratio at x = %g is %g", x, ratio);
            }
        }
        return check_pass();
    });

    check("gamma-cdf-poisson-sum", [] {
        check_rng rng(0xC0FFEE01);
        for (int i = 0; i < 50; ++i) {
            const int m = rng.uniform_int(1, 400);
            const double x = std::min(600.0, m * rng.uniform(0.2, 2.0));
            const double got = sf::gamma_cdf(x, m);
            const double want = poisson_sum_gamma_cdf(x, m);
            if (std::fabs(got - want) > 1e-9) {
                return failf("mismatch %g at closed form %g", got, want);
            }
        }
        return check_pass();
    });

    check("gamma-cdf-monotone", [] {
        double prev = -1.0;
        for (int i = 0; i <= 10000; ++i) {
            const double x = 80.0 * i / 10000.0;
            const double p = sf::gamma_cdf(x, 16);
            if (p < prev) return failf("local inversion at x = %g (drop %g)", x, prev - p);
            prev = p;
        }
        return check_pass();
    });

    check("gamma-inverse-roundtrip", [] {
        check_rng rng(0xC0FFEE02);
        for (const int shape : {1, 2, 16, 256, 4096}) {
            for (int i = 0; i < 20; ++i) {
                const double p = rng.uniform(1e-6, 1.0 - 1e-6);
                const double x = sf::gamma_cdf_inv(p, shape);
                if (std::fabs(sf::gamma_cdf(x, shape) - p) > 1e-10) {
                    return failf("residual %g at p = %g", sf::gamma_cdf(x, shape) - p, p);
                }
            }
        }
        return check_pass();
    });

    check("normal-inverse-roundtrip", [] {
        check_rng rng(0xC0FFEE03);
        for (int i = 0; i < 100; ++i) {
            const double p = rng.log_uniform(1e-6, 1.0 - 1e-6);
            const double x = sf::std_normal_tail_inv(p);
            if (std::fabs(sf::std_normal_tail(x) - p) > 1e-9 * p) {
                return failf("relative residual %g at p = %g",
                             (sf::std_normal_tail(x) - p) / p, p);
            }
        }
        return check_pass();
    });

    check("beta-identities", [] {
        if (std::fabs(sf::reg_incomplete_beta(0.37, 1, 1) - 0.37) > 1e-12) {
            return std::string("I_x(1,1) != x");
        }
        if (sf::reg_incomplete_beta(0.0, 3, 5) != 0.0 || sf::reg_incomplete_beta(1.0, 3, 5) != 1.0) {
            return std::string("boundary mass wrong");
        }
        check_rng rng(0xC0FFEE04);
        for (int i = 0; i < 50; ++i) {
            const int a = rng.uniform_int(1, 100);
            const int b = rng.uniform_int(1, 100);
            const double x = rng.uniform(0.0, 1.0);
            const double s =
                sf::reg_incomplete_beta(x, a, b) + sf::reg_incomplete_beta(1.0 - x, b, a);
            if (std::fabs(s - 1.0) > 1e-9) return failf("symmetry defect %g at x = %g", s - 1.0, x);
        }
        return check_pass();
    });

    check("mdp-identity", [] {
        check_rng rng(0xC0FFEE05);
        for (int i = 0; i < 20; ++i) {
            const int m = rng.uniform_int(1, 64);
            const int n_rs = rng.uniform_int(2, 512);
            const double p_fa = rng.log_uniform(1e-4, 0.2);
            const double rho = rng.log_uniform(1e-3, 10.0);
            const double via_mdp =
                an::bob_mdp(an::bob_threshold(p_fa, m, n_rs), rho, m, n_rs);
            const double via_fm = an::f_m(1.0 / (rho * n_rs), m, p_fa);
            if (std::fabs(via_mdp - via_fm) > 1e-8) {
                return failf("identity defect %g (mdp %g)", via_mdp - via_fm, via_mdp);
            }
        }
        return check_pass();
    });

    check("design-closure", [] {
        const struct {
            double p_fa, p_md, alpha, noise;
            int m, n;
        } pts[] = {{1e-3, 1e-3, 0.5, 1.0, 16, 256}, {1e-2, 1e-2, 0.25, 2.5, 8, 512}};
        for (const auto& pt : pts) {
            const auto [params, thresholds] =
                design_point({pt.p_fa, pt.p_md}, pt.n, pt.alpha, pt.m, pt.noise);
            const double fap = an::bob_fap(thresholds.eta_b, pt.m, params.n_rs);
            const double mdp = an::bob_mdp(thresholds.eta_b, params.rho(), pt.m, params.n_rs);
            if (std::fabs(fap - pt.p_fa) > 1e-6) return failf("fap %g != target %g", fap, pt.p_fa);
            if (std::fabs(mdp - pt.p_md) > 1e-6) return failf("mdp %g != target %g", mdp, pt.p_md);
        }
        return check_pass();
    });

    check("warden-lower-bound", [] {
        double prev_gap = 2.0;
        for (const int n : {64, 128, 256, 512, 1024}) {
            const double dp = an::willie_dp_design(1e-3, 1e-3, 16, n, 0.5);
            if (dp < 1e-3) return failf("dp %g dipped below p_fa at n = %g", dp, n);
            const double gap = dp - 1e-3;
            if (gap >= prev_gap) return failf("gap %g not decreasing (prev %g)", gap, prev_gap);
            prev_gap = gap;
        }
        if (an::willie_dp_design(1e-2, 1e-2, 4, 64, 0.25) < 1e-2) {
            return std::string("dp below p_fa at the secondary point");
        }
        return check_pass();
    });

    check("taylor-flatness", [] {
        const double base =
            (an::willie_dp_taylor(1e-3, 1e-3, 16, 1024, 0.5) - 1e-3) * std::sqrt(1024.0);
        for (const int n : {4096, 16384}) {
            const double v = (an::willie_dp_taylor(1e-3, 1e-3, 16, n, 0.5) - 1e-3) *
                             std::sqrt(static_cast<double>(n));
            if (std::fabs(v - base) > 1e-12 * base) return failf("drift %g at n = %g", v - base, n);
        }
        return check_pass();
    });

    check("asymptotic-mn-symmetry", [] {
        const double a = an::willie_dp_asymptotic(1e-3, 1e-3, 4, 1024, 0.5);
        const double b = an::willie_dp_asymptotic(1e-3, 1e-3, 16, 256, 0.5);
        if (std::fabs(a - b) > 1e-15 * b) return failf("m*n symmetry broken: %g vs %g", a, b);
        return check_pass();
    });

    check("asymptotic-ladder", [] {
        // |design - taylor| should fall off as 1/N (log-log slope -1 +- 0.2).
        double lo_n = 1024.0, hi_n = 1048576.0;
        const double g_lo = std::fabs(an::willie_dp_design(1e-3, 1e-3, 16, 1024, 0.5) -
                                      an::willie_dp_taylor(1e-3, 1e-3, 16, 1024, 0.5));
        const double g_hi = std::fabs(an::willie_dp_design(1e-3, 1e-3, 16, 1048576, 0.5) -
                                      an::willie_dp_taylor(1e-3, 1e-3, 16, 1048576, 0.5));
        const double slope = (std::log(g_hi) - std::log(g_lo)) / (std::log(hi_n) - std::log(lo_n));
        if (std::fabs(slope + 1.0) > 0.2) return failf("slope %g (want -1 +- %g)", slope, 0.2);
        // |design - asymptotic| decreasing in m at fixed N.
        double prev = 2.0;
        for (const int m : {4, 16, 64}) {
            const double gap = std::fabs(an::willie_dp_design(1e-3, 1e-3, m, 256, 0.5) -
                                         an::willie_dp_asymptotic(1e-3, 1e-3, m, 256, 0.5));
            if (gap >= prev) return failf("asymptotic gap %g not decreasing (prev %g)", gap, prev);
            prev = gap;
        }
        return check_pass();
    });

    check("reference-sequence", [] {
        const auto seq = mc::gen_reference_sequence(257, 42);
        double norm2 = 0.0;
        for (const auto& s : seq.symbols) {
            if (std::fabs(std::norm(s) - 1.0) > 1e-12) {
                return failf("symbol modulus deviates by %g (%g)", std::norm(s) - 1.0, 0.0);
            }
            norm2 += std::norm(s);
        }
        if (std::fabs(norm2 - 257.0) > 1e-9) return failf("norm^2 %g != %g", norm2, 257.0);
        const auto again = mc::gen_reference_sequence(257, 42);
        if (again.symbols != seq.symbols) return std::string("not deterministic in the seed");
        const auto prefix = mc::gen_reference_sequence(64, 42);
        for (int k = 0; k < 64; ++k) {
            if (prefix.symbols[k] != seq.symbols[k]) return std::string("prefix property broken");
        }
        return check_pass();
    });

    check("statistic-edges", [] {
        const int m = 4, n_rs = 32;
        const auto seq = mc::gen_reference_sequence(n_rs, 7);
        rng::counter_stream ch(7, rng::stream_channel, 0);
        std::vector<std::complex<double>> h(m);
        for (auto& g : h) g = ch.next_cnormal(1.0);
        mc::ReceivedBlock noiseless{n_rs, m, {}};
        noiseless.samples.resize(static_cast<std::size_t>(n_rs) * m);
        for (int k = 0; k < n_rs; ++k) {
            for (int i = 0; i < m; ++i) noiseless.at(k, i) = seq.symbols[k] * h[i];
        }
        if (std::fabs(mc::bob_statistic(noiseless, seq) - 1.0) > 1e-10) {
            return std::string("noiseless block does not reach Lambda = 1");
        }
        // Columns orthogonal to the reference: flip the sign of the second half.
        mc::ReceivedBlock orth = noiseless;
        for (int k = n_rs / 2; k < n_rs; ++k) {
            for (int i = 0; i < m; ++i) orth.at(k, i) = -orth.at(k, i);
        }
        if (mc::bob_statistic(orth, seq) > 1e-12) {
            return failf("orthogonal block gives Lambda = %g (want <= %g)",
                         mc::bob_statistic(orth, seq), 1e-12);
        }
        mc::ReceivedBlock zero{n_rs, m, std::vector<std::complex<double>>(
                                            static_cast<std::size_t>(n_rs) * m)};
        try {
            (void)mc::bob_statistic(zero, seq);
            return std::string("all-zero block did not raise for Bob");
        } catch (const domain_error&) {
        }
        if (mc::willie_statistic(zero, 1.0) != -1.0) {
            return std::string("all-zero block is not T_W = -1");
        }
        mc::ReceivedBlock flat{8, 2, {}};
        flat.samples.assign(16, {0.7, 0.0});
        if (std::fabs(mc::willie_statistic(flat, 0.49)) > 1e-12) {
            return std::string("calibration point |r|^2 = sigma^2 is not T_W = 0");
        }
        return check_pass();
    });

    check("statistic-range", [] {
        const auto [params, thresholds] = design_point({1e-2, 1e-2}, 64, 0.5, 4, 1.0);
        (void)thresholds;
        const mc::TrialPlan plan{2000, 11, 0.99};
        for (const auto hyp : {mc::Hypothesis::h0, mc::Hypothesis::h1}) {
            for (const double lam : mc::collect_bob_statistics(params, hyp, plan, 2)) {
                if (!(lam >= 0.0 && lam <= 1.0)) return failf("Lambda = %g outside [0,%g]", lam, 1.0);
            }
            for (const double t : mc::collect_willie_statistics(params, hyp, plan, 2)) {
                if (!(t >= -1.0)) return failf("T_W = %g below %g", t, -1.0);
            }
        }
        return check_pass();
    });

    check("trial-determinism", [] {
        const auto [params, thresholds] = design_point({1e-2, 1e-2}, 64, 0.5, 4, 1.0);
        const mc::TrialPlan plan{2000, 999, 0.99};
        const auto b1 = mc::run_bob_trials(params, thresholds, mc::Hypothesis::h1, plan, 1);
        const auto b4 = mc::run_bob_trials(params, thresholds, mc::Hypothesis::h1, plan, 4);
        const auto b4b = mc::run_bob_trials(params, thresholds, mc::Hypothesis::h1, plan, 4);
        if (b1.events != b4.events || b4.events != b4b.events) {
            return std::string("Bob trial counts differ across thread counts/replays");
        }
        const auto w1 = mc::run_willie_trials(params, thresholds, mc::Hypothesis::h0, plan, 1);
        const auto w4 = mc::run_willie_trials(params, thresholds, mc::Hypothesis::h0, plan, 4);
        if (w1.events != w4.events) {
            return std::string("Willie trial counts differ across thread counts");
        }
        return check_pass();
    });

    check("bob-h0-false-alarm-oracle", [] {
        const int m = 4, n_rs = 32;
        analytic::SystemParams params;
        params.n_total = 64;
        params.n_rs = n_rs;
        params.m_antennas = m;
        params.noise_power = 1.0;
        params.tx_power = 0.0;
        params.alpha = 0.5;
        analytic::Thresholds thresholds;
        thresholds.eta_b = an::bob_threshold(0.1, m, n_rs);
        thresholds.eta_w = an::willie_threshold(0.1, m, 64);
        thresholds.target_fap = 0.1;
        const auto rate = mc::run_bob_trials(params, thresholds, mc::Hypothesis::h0,
                                             {20000, 777, 0.999});
        const double oracle = mc::bob_exact_fap_oracle(thresholds.eta_b, m, n_rs);
        if (oracle < rate.ci_low || oracle > rate.ci_high) {
            return failf("oracle %g outside CI around %g", oracle, rate.estimate);
        }
        return check_pass();
    });

    check("willie-h0-false-alarm-oracle", [] {
        analytic::SystemParams params;
        params.n_total = 64;
        params.n_rs = 32;
        params.m_antennas = 4;
        params.noise_power = 1.0;
        params.tx_power = 0.0;
        params.alpha = 0.5;
        analytic::Thresholds thresholds;
        thresholds.eta_b = an::bob_threshold(0.05, 4, 32);
        thresholds.eta_w = an::willie_threshold(0.05, 4, 64);
        thresholds.target_fap = 0.05;
        const auto rate = mc::run_willie_trials(params, thresholds, mc::Hypothesis::h0,
                                                {20000, 778, 0.999});
        const double oracle = mc::willie_exact_fap_oracle(thresholds.eta_w, 4, 64);
        if (oracle < rate.ci_low || oracle > rate.ci_high) {
            return failf("oracle %g outside CI around %g", oracle, rate.estimate);
        }
        return check_pass();
    });

    check("scale-invariance", [] {
        const auto [params, thresholds] = design_point({1e-2, 1e-2}, 64, 0.5, 4, 1.0);
        auto scaled = params;
        scaled.noise_power *= 4.0; // exact binary scaling
        scaled.tx_power *= 4.0;
        const mc::TrialPlan plan{4000, 2024, 0.99};
        const auto base_miss = mc::run_bob_trials(params, thresholds, mc::Hypothesis::h1, plan);
        const auto scal_miss = mc::run_bob_trials(scaled, thresholds, mc::Hypothesis::h1, plan);
        if (base_miss.events != scal_miss.events) {
            return std::string("Bob miss counts changed under common power scaling");
        }
        const auto base_dp = mc::run_willie_trials(params, thresholds, mc::Hypothesis::h1, plan);
        const auto scal_dp = mc::run_willie_trials(scaled, thresholds, mc::Hypothesis::h1, plan);
        if (base_dp.events != scal_dp.events) {
            return std::string("Willie detection counts changed under common power scaling");
        }
        return check_pass();
    });

    check("power-monotonicity", [] {
        const auto [params, thresholds] = design_point({1e-2, 1e-2}, 64, 0.5, 4, 1.0);
        const mc::TrialPlan plan{4000, 31337, 0.99};
        std::uint64_t prev = std::numeric_limits<std::uint64_t>::max();
        for (const double scale : {0.5, 1.0, 2.0}) {
            auto p = params;
            p.tx_power *= scale;
            const auto miss = mc::run_bob_trials(p, thresholds, mc::Hypothesis::h1, plan);
            if (miss.events > prev) {
                return failf("miss count rose to %g when power scaled by %g",
                             static_cast<double>(miss.events), scale);
            }
            prev = miss.events;
        }
        return check_pass();
    });

    check("zero-power-degeneracy", [] {
        // Willie's H1 with tx_power = 0 must be statistically indistinguishable
        // from H0 (two-proportion z-test at the 1% level).
        analytic::SystemParams params;
        params.n_total = 64;
        params.n_rs = 32;
        params.m_antennas = 4;
        params.noise_power = 1.0;
        params.tx_power = 0.0;
        params.alpha = 0.5;
        analytic::Thresholds thresholds;
        thresholds.eta_b = an::bob_threshold(0.05, 4, 32);
        thresholds.eta_w = an::willie_threshold(0.05, 4, 64);
        thresholds.target_fap = 0.05;
        const auto h1 = mc::run_willie_trials(params, thresholds, mc::Hypothesis::h1,
                                              {100000, 5001, 0.99});
        const auto h0 = mc::run_willie_trials(params, thresholds, mc::Hypothesis::h0,
                                              {100000, 5002, 0.99});
        const double z = mc::two_proportion_z(h1.events, h1.trials, h0.events, h0.trials);
        if (std::fabs(z) > 2.5758293035489004) {
            return failf("z = %g rejects equality at the 1%% level (|z| > %g)", z,
                         2.5758293035489004);
        }
        return check_pass();
    });

    return check.failures;
}

} // namespace covert::harness
