#include "montecarlo.hpp"

#include "errors.hpp"
#include "philox.hpp"
#include "specfun.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace covert::mc {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

// Per-thread workspace. All buffers are reused across trials; nothing here is
// shared between threads.
struct scratch {
    std::vector<double> u1, u2;     // uniforms from the counter stream
    std::vector<double> re, im;     // complex Gaussian samples (split layout)
    std::vector<double> yre, yim;   // per-antenna projection accumulators
    std::vector<double> h_re, h_im; // channel draw
};

// Fills n circularly-symmetric complex Gaussian samples with E|n_k|^2 =
// variance into s.re/s.im: sample k comes from Philox block k of
// (seed, stream, trial), exactly matching counter_stream::next_cnormal's
// block consumption, but laid out as flat loops the compiler can vectorize.
void fill_cnormals(std::uint64_t seed, std::uint32_t stream, std::uint64_t trial, std::size_t n,
                   double variance, scratch& s) {
    if (s.u1.size() < n) {
        s.u1.resize(n);
        s.u2.resize(n);
        s.re.resize(n);
        s.im.resize(n);
    }
    const rng::philox4x32::key_t key{static_cast<std::uint32_t>(seed),
                                     static_cast<std::uint32_t>(seed >> 32)};
    const auto trial_lo = static_cast<std::uint32_t>(trial);
    const auto trial_hi = static_cast<std::uint32_t>(trial >> 32);
    for (std::size_t k = 0; k < n; ++k) {
        const auto b = rng::philox4x32::encrypt(
            {static_cast<std::uint32_t>(k), stream, trial_lo, trial_hi}, key);
        const std::uint64_t w0 = (std::uint64_t(b[0]) << 32) | b[1];
        const std::uint64_t w1 = (std::uint64_t(b[2]) << 32) | b[3];
        s.u1[k] = static_cast<double>((w0 >> 11) + 1) * 0x1.0p-53; // (0,1]
        s.u2[k] = static_cast<double>((w1 >> 11) + 1) * 0x1.0p-53;
    }
    for (std::size_t k = 0; k < n; ++k) {
        s.u1[k] = std::sqrt(-variance * std::log(s.u1[k]));
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = two_pi * s.u2[k];
        s.re[k] = s.u1[k] * std::cos(theta);
        s.im[k] = s.u1[k] * std::sin(theta);
    }
}

void draw_channel(std::uint64_t seed, std::uint64_t trial, int m, scratch& s) {
    if (s.h_re.size() < static_cast<std::size_t>(m)) {
        s.h_re.resize(m);
        s.h_im.resize(m);
    }
    rng::counter_stream ch(seed, rng::stream_channel, trial);
    for (int i = 0; i < m; ++i) {
        const auto g = ch.next_cnormal(1.0);
        s.h_re[i] = g.real();
        s.h_im[i] = g.imag();
    }
}

// Splits [0, n_trials) into fixed batches handed to workers through an atomic
// cursor. Aggregation is an integer count, so the total is independent of
// which thread ran which batch — bit-identical results for any thread count.
template <typename TrialFn>
std::uint64_t count_events(std::uint64_t n_trials, int threads, const TrialFn& trial_fn) {
    const int n_workers = resolve_thread_count(threads);
    constexpr std::uint64_t batch = 256;
    std::atomic<std::uint64_t> cursor{0};
    std::atomic<std::uint64_t> total{0};
    const auto worker = [&] {
        scratch s;
        for (;;) {
            const std::uint64_t b = cursor.fetch_add(1, std::memory_order_relaxed);
            const std::uint64_t lo = b * batch;
            if (lo >= n_trials) return;
            const std::uint64_t hi = std::min(lo + batch, n_trials);
            std::uint64_t events = 0;
            for (std::uint64_t t = lo; t < hi; ++t) {
                events += trial_fn(t, s) ? 1 : 0;
            }
            total.fetch_add(events, std::memory_order_relaxed);
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return total.load();
}

template <typename TrialFn>
std::vector<double> collect_values(std::uint64_t n_trials, int threads, const TrialFn& trial_fn) {
    std::vector<double> out(n_trials);
    const int n_workers = resolve_thread_count(threads);
    constexpr std::uint64_t batch = 256;
    std::atomic<std::uint64_t> cursor{0};
    const auto worker = [&] {
        scratch s;
        for (;;) {
            const std::uint64_t b = cursor.fetch_add(1, std::memory_order_relaxed);
            const std::uint64_t lo = b * batch;
            if (lo >= n_trials) return;
            const std::uint64_t hi = std::min(lo + batch, n_trials);
            for (std::uint64_t t = lo; t < hi; ++t) out[t] = trial_fn(t, s);
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

// Bob's statistic for one trial, computed in-stream (no materialized block):
// accumulates the per-antenna projections y_i = sum_k conj(s_k) r_{k,i} and
// the total energy, over the N_RS training rows.
double bob_trial_statistic(const analytic::SystemParams& p, Hypothesis hyp,
                           const std::vector<std::complex<double>>& symbols, std::uint64_t seed,
                           std::uint64_t trial, scratch& s) {
    const int m = p.m_antennas;
    const int n_rs = p.n_rs;
    const std::size_t count = static_cast<std::size_t>(n_rs) * m;
    fill_cnormals(seed, rng::stream_noise, trial, count, p.noise_power, s);
    const bool present = hyp == Hypothesis::h1;
    const double amp = present ? std::sqrt(p.tx_power) : 0.0;
    if (present) draw_channel(seed, trial, m, s);

    if (s.yre.size() < static_cast<std::size_t>(m)) {
        s.yre.resize(m);
        s.yim.resize(m);
    }
    std::fill_n(s.yre.begin(), m, 0.0);
    std::fill_n(s.yim.begin(), m, 0.0);
    double energy = 0.0;
    std::size_t idx = 0;
    for (int k = 0; k < n_rs; ++k) {
        const double sk_re = symbols[k].real();
        const double sk_im = symbols[k].imag();
        for (int i = 0; i < m; ++i, ++idx) {
            double r_re = s.re[idx];
            double r_im = s.im[idx];
            if (present) {
                // r += amp * s_k * h_i
                r_re += amp * (sk_re * s.h_re[i] - sk_im * s.h_im[i]);
                r_im += amp * (sk_re * s.h_im[i] + sk_im * s.h_re[i]);
            }
            energy += r_re * r_re + r_im * r_im;
            // y_i += conj(s_k) * r
            s.yre[i] += sk_re * r_re + sk_im * r_im;
            s.yim[i] += sk_re * r_im - sk_im * r_re;
        }
    }
    double proj = 0.0;
    for (int i = 0; i < m; ++i) proj += s.yre[i] * s.yre[i] + s.yim[i] * s.yim[i];
    return proj / (static_cast<double>(n_rs) * energy);
}

// Willie's statistic for one trial: average energy over all N rows,
// normalized by the noise power, minus one.
double willie_trial_statistic(const analytic::SystemParams& p, Hypothesis hyp,
                              const std::vector<std::complex<double>>& symbols,
                              std::uint64_t seed, std::uint64_t trial, scratch& s) {
    const int m = p.m_antennas;
    const int n = p.n_total;
    const std::size_t count = static_cast<std::size_t>(n) * m;
    fill_cnormals(seed, rng::stream_noise, trial, count, p.noise_power, s);
    const bool present = hyp == Hypothesis::h1;
    double energy = 0.0;
    if (present) {
        const double amp = std::sqrt(p.tx_power);
        draw_channel(seed, trial, m, s);
        std::size_t idx = 0;
        for (int k = 0; k < n; ++k) {
            const double sk_re = symbols[k].real();
            const double sk_im = symbols[k].imag();
            for (int i = 0; i < m; ++i, ++idx) {
                const double r_re = s.re[idx] + amp * (sk_re * s.h_re[i] - sk_im * s.h_im[i]);
                const double r_im = s.im[idx] + amp * (sk_re * s.h_im[i] + sk_im * s.h_re[i]);
                energy += r_re * r_re + r_im * r_im;
            }
        }
    } else {
        for (std::size_t idx = 0; idx < count; ++idx) {
            energy += s.re[idx] * s.re[idx] + s.im[idx] * s.im[idx];
        }
    }
    return energy / (static_cast<double>(m) * n * p.noise_power) - 1.0;
}

void check_plan(const TrialPlan& plan, const char* fn) {
    if (plan.n_trials < 1) {
        throw config_error(std::string(fn) + ": n_trials must be >= 1");
    }
    if (!(plan.confidence_level > 0.0 && plan.confidence_level < 1.0)) {
        throw config_error(std::string(fn) + ": confidence_level must lie in (0,1)");
    }
}

void check_h1_power(const analytic::SystemParams& p, Hypothesis hyp, const char* fn) {
    if (hyp == Hypothesis::h1 && !(p.tx_power > 0.0)) {
        throw domain_error(std::string(fn) + ": H1 requires tx_power > 0");
    }
}

} // namespace

int resolve_thread_count(int threads) {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("COVERT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ReferenceSequence gen_reference_sequence(int n_rs, std::uint64_t seed) {
    if (n_rs < 1) {
        throw domain_error("gen_reference_sequence: n_rs must be >= 1, got " +
                           std::to_string(n_rs));
    }
    ReferenceSequence seq;
    seq.symbols.reserve(n_rs);
    // One Philox block per symbol (trial index 0 of the symbols stream), so a
    // longer sequence from the same seed extends this one without reshuffling.
    rng::counter_stream st(seed, rng::stream_symbols, 0);
    for (int k = 0; k < n_rs; ++k) {
        const double phase = two_pi * st.next_unit();
        seq.symbols.emplace_back(std::cos(phase), std::sin(phase));
    }
    return seq;
}

double bob_statistic(const ReceivedBlock& block, const ReferenceSequence& s_rs) {
    const int n_rs = block.rows;
    const int m = block.cols;
    if (n_rs < 1 || m < 1 ||
        block.samples.size() != static_cast<std::size_t>(n_rs) * m) {
        throw domain_error("bob_statistic: block dimensions are inconsistent");
    }
    if (s_rs.symbols.size() != static_cast<std::size_t>(n_rs)) {
        throw domain_error("bob_statistic: reference length does not match block rows");
    }
    double energy = 0.0;
    double proj = 0.0;
    for (int i = 0; i < m; ++i) {
        std::complex<double> y{0.0, 0.0};
        for (int k = 0; k < n_rs; ++k) {
            const auto& r = block.at(k, i);
            energy += std::norm(r);
            y += std::conj(s_rs.symbols[k]) * r;
        }
        proj += std::norm(y);
    }
    if (energy == 0.0) {
        // The measure-zero 0/0 input: surface it rather than defining it away.
        throw domain_error("bob_statistic: all-zero received block (statistic undefined)");
    }
    return proj / (static_cast<double>(n_rs) * energy);
}

double willie_statistic(const ReceivedBlock& block, double noise_power) {
    if (!(noise_power > 0.0)) {
        throw domain_error("willie_statistic: noise_power must be positive");
    }
    const int n = block.rows;
    const int m = block.cols;
    if (n < 1 || m < 1 || block.samples.size() != static_cast<std::size_t>(n) * m) {
        throw domain_error("willie_statistic: block dimensions are inconsistent");
    }
    double energy = 0.0;
    for (const auto& r : block.samples) energy += std::norm(r);
    return energy / (static_cast<double>(m) * n * noise_power) - 1.0;
}

EmpiricalRate run_bob_trials(const analytic::SystemParams& params,
                             const analytic::Thresholds& thresholds, Hypothesis hypothesis,
                             const TrialPlan& plan, int threads) {
    params.validate();
    check_plan(plan, "run_bob_trials");
    check_h1_power(params, hypothesis, "run_bob_trials");
    const auto symbols = gen_reference_sequence(params.n_rs, plan.master_seed).symbols;
    const double eta_b = thresholds.eta_b;
    const std::uint64_t seed = plan.master_seed;
    const auto trial = [&](std::uint64_t t, scratch& s) {
        const double lambda = bob_trial_statistic(params, hypothesis, symbols, seed, t, s);
        // H0: count false alarms; H1: count misses.
        return hypothesis == Hypothesis::h0 ? lambda > eta_b : lambda <= eta_b;
    };
    const std::uint64_t events = count_events(plan.n_trials, threads, trial);
    return make_empirical_rate(events, plan.n_trials, plan.confidence_level);
}

EmpiricalRate run_willie_trials(const analytic::SystemParams& params,
                                const analytic::Thresholds& thresholds, Hypothesis hypothesis,
                                const TrialPlan& plan, int threads) {
    params.validate();
    check_plan(plan, "run_willie_trials");
    // tx_power = 0 under H1 is allowed: the frame carries no energy and the
    // statistic degenerates to its H0 law (useful as a null experiment).
    // Full frame: the training prefix plus unit-modulus payload symbols.
    const auto symbols = hypothesis == Hypothesis::h1
                             ? gen_reference_sequence(params.n_total, plan.master_seed).symbols
                             : std::vector<std::complex<double>>{};
    const double eta_w = thresholds.eta_w;
    const std::uint64_t seed = plan.master_seed;
    const auto trial = [&](std::uint64_t t, scratch& s) {
        return willie_trial_statistic(params, hypothesis, symbols, seed, t, s) > eta_w;
    };
    const std::uint64_t events = count_events(plan.n_trials, threads, trial);
    return make_empirical_rate(events, plan.n_trials, plan.confidence_level);
}

std::vector<double> collect_bob_statistics(const analytic::SystemParams& params,
                                           Hypothesis hypothesis, const TrialPlan& plan,
                                           int threads) {
    params.validate();
    check_plan(plan, "collect_bob_statistics");
    check_h1_power(params, hypothesis, "collect_bob_statistics");
    const auto symbols = gen_reference_sequence(params.n_rs, plan.master_seed).symbols;
    const std::uint64_t seed = plan.master_seed;
    return collect_values(plan.n_trials, threads, [&](std::uint64_t t, scratch& s) {
        return bob_trial_statistic(params, hypothesis, symbols, seed, t, s);
    });
}

std::vector<double> collect_willie_statistics(const analytic::SystemParams& params,
                                              Hypothesis hypothesis, const TrialPlan& plan,
                                              int threads) {
    params.validate();
    check_plan(plan, "collect_willie_statistics");
    const auto symbols = hypothesis == Hypothesis::h1
                             ? gen_reference_sequence(params.n_total, plan.master_seed).symbols
                             : std::vector<std::complex<double>>{};
    const std::uint64_t seed = plan.master_seed;
    return collect_values(plan.n_trials, threads, [&](std::uint64_t t, scratch& s) {
        return willie_trial_statistic(params, hypothesis, symbols, seed, t, s);
    });
}

double bob_exact_fap_oracle(double eta_b, int m, int n_rs) {
    if (!(eta_b >= 0.0 && eta_b <= 1.0)) {
        throw domain_error("bob_exact_fap_oracle: eta_b must lie in [0,1]");
    }
    if (m < 1 || n_rs < 2) {
        throw domain_error(
            "bob_exact_fap_oracle: need m >= 1 and n_rs >= 2 (Beta(m, m*(n_rs-1)) law)");
    }
    // 1 - I_x(a,b) = I_{1-x}(b,a): evaluate the tail directly for relative
    // accuracy at small false-alarm levels.
    return specfun::reg_incomplete_beta(1.0 - eta_b, m * (n_rs - 1), m);
}

double willie_exact_fap_oracle(double eta_w, int m, int n_total) {
    if (m < 1 || n_total < 1) {
        throw domain_error("willie_exact_fap_oracle: m and n_total must be >= 1");
    }
    if (!(eta_w > -1.0)) {
        return 1.0; // threshold at or below the statistic's support
    }
    const int mn = m * n_total;
    return specfun::gamma_tail(static_cast<double>(mn) * (1.0 + eta_w), mn);
}

EmpiricalRate make_empirical_rate(std::uint64_t events, std::uint64_t trials,
                                  double confidence) {
    if (trials == 0) {
        throw domain_error("make_empirical_rate: trials must be >= 1");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw domain_error("make_empirical_rate: confidence must lie in (0,1)");
    }
    const double n = static_cast<double>(trials);
    const double p_hat = static_cast<double>(events) / n;
    const double z = specfun::std_normal_tail_inv(0.5 * (1.0 - confidence));
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p_hat + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
    EmpiricalRate r;
    r.events = events;
    r.trials = trials;
    r.estimate = p_hat;
    // At the extremes the score interval's touched endpoint is exactly 0 or 1
    // in real arithmetic; computing it through center/half would lose an ulp.
    r.ci_low = events == 0 ? 0.0 : std::max(0.0, center - half);
    r.ci_high = events == trials ? 1.0 : std::min(1.0, center + half);
    return r;
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) {
        throw domain_error("ks_statistic: need at least one sample");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n,
                                 static_cast<double>(i + 1) / n - f));
    }
    return d;
}

double ks_critical_value(double significance, std::size_t n) {
    if (!(significance > 0.0 && significance < 1.0) || n == 0) {
        throw domain_error("ks_critical_value: invalid significance or sample count");
    }
    // Kolmogorov distribution tail: c(alpha) = sqrt(-ln(alpha/2)/2).
    return std::sqrt(-0.5 * std::log(0.5 * significance)) / std::sqrt(static_cast<double>(n));
}

double two_proportion_z(std::uint64_t events_a, std::uint64_t trials_a, std::uint64_t events_b,
                        std::uint64_t trials_b) {
    if (trials_a == 0 || trials_b == 0) {
        throw domain_error("two_proportion_z: trial counts must be >= 1");
    }
    const double na = static_cast<double>(trials_a);
    const double nb = static_cast<double>(trials_b);
    const double pa = static_cast<double>(events_a) / na;
    const double pb = static_cast<double>(events_b) / nb;
    const double pooled = (static_cast<double>(events_a) + static_cast<double>(events_b)) /
                          (na + nb);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
    if (se == 0.0) return 0.0; // identical degenerate rates
    return (pa - pb) / se;
}

} // namespace covert::mc
