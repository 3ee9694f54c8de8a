// C ABI shim over the C++ core: exceptions become status codes, the failing
// message is parked in a thread-local buffer, and sweep/result objects are
// handed out as tagged opaque handles.

#include "covert/covert.h"

#include "analytic.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "montecarlo.hpp"

#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <utility>
#include <vector>

namespace {

namespace an = covert::analytic;
namespace mc = covert::mc;
namespace hn = covert::harness;

thread_local std::string g_last_error;

covert_status set_error(covert_status code, const std::string& what) {
    g_last_error = what;
    return code;
}

covert_status status_from_current_exception() {
    try {
        throw;
    } catch (const covert::error& e) {
        return set_error(static_cast<covert_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(COVERT_ERR_NUMERICAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(COVERT_ERR_NUMERICAL, e.what());
    } catch (...) {
        return set_error(COVERT_ERR_NUMERICAL, "unknown error");
    }
}

template <typename Fn>
covert_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return COVERT_OK;
    } catch (...) {
        return status_from_current_exception();
    }
}

covert_status null_arg(const char* name) {
    return set_error(COVERT_ERR_CONFIG, std::string(name) + " must not be null");
}

constexpr std::uint32_t sweep_magic = 0x73777665;   // "swve"
constexpr std::uint32_t results_magic = 0x72736c74; // "rslt"

an::SystemParams to_system_params(const covert_params& p) {
    an::SystemParams out;
    out.n_total = p.n_total;
    out.n_rs = p.n_rs;
    out.m_antennas = p.m_antennas;
    out.noise_power = p.noise_power;
    out.tx_power = p.tx_power;
    out.alpha = p.alpha;
    return out;
}

covert_status check_sim_options(const covert_sim_options* options) {
    if (!options) return null_arg("options");
    if (options->hypothesis != 0 && options->hypothesis != 1) {
        return set_error(COVERT_ERR_CONFIG, "hypothesis must be 0 (absent) or 1 (present)");
    }
    return COVERT_OK;
}

void fill_empirical(covert_empirical& out, const mc::EmpiricalRate& rate) {
    out.events = rate.events;
    out.trials = rate.trials;
    out.estimate = rate.estimate;
    out.ci_low = rate.ci_low;
    out.ci_high = rate.ci_high;
}

} // namespace

struct covert_sweep {
    std::uint32_t magic = sweep_magic;
    hn::SweepSpec spec;
};

struct covert_results {
    std::uint32_t magic = results_magic;
    std::vector<hn::ResultRow> rows;
};

namespace {

bool valid(const covert_sweep* s) { return s && s->magic == sweep_magic; }
bool valid(const covert_results* r) { return r && r->magic == results_magic; }

covert_status bad_handle(const char* kind) {
    return set_error(COVERT_ERR_INVALID_HANDLE,
                     std::string("invalid ") + kind + " handle (null, freed, or foreign)");
}

// Returns the numeric value of one ResultRow column, NaN when absent.
// Column order must match harness::result_columns().
double numeric_cell(const hn::ResultRow& r, std::size_t col) {
    const double no_trials = std::numeric_limits<double>::quiet_NaN();
    switch (col) {
    case 0: return r.n_total;
    case 1: return r.n_rs;
    case 2: return r.alpha;
    case 3: return r.m_antennas;
    case 4: return r.noise_power;
    case 5: return r.tx_power;
    case 6: return r.rho;
    case 7: return r.p_fa;
    case 8: return r.p_md;
    case 9: return r.eta_b;
    case 10: return r.eta_w;
    case 11: return r.bob_fap;
    case 12: return r.bob_mdp;
    case 13: return r.willie_fap;
    case 14: return r.willie_dp_design;
    case 15: return r.willie_dp_taylor;
    case 16: return r.willie_dp_asymptotic;
    case 17: return r.bob_fap_oracle;
    case 18: return r.willie_fap_oracle;
    case 19: return r.bob_fap_emp;
    case 20: return r.bob_fap_ci_low;
    case 21: return r.bob_fap_ci_high;
    case 22: return r.bob_mdp_emp;
    case 23: return r.bob_mdp_ci_low;
    case 24: return r.bob_mdp_ci_high;
    case 25: return r.willie_fap_emp;
    case 26: return r.willie_fap_ci_low;
    case 27: return r.willie_fap_ci_high;
    case 28: return r.willie_dp_emp;
    case 29: return r.willie_dp_ci_low;
    case 30: return r.willie_dp_ci_high;
    case 31: return r.trials > 0 ? static_cast<double>(r.trials) : no_trials;
    case 32: return r.trials > 0 ? static_cast<double>(r.seed) : no_trials;
    default: return no_trials;
    }
}

} // namespace

extern "C" {

const char* covert_version(void) { return "0.1.0"; }

const char* covert_status_name(covert_status status) {
    switch (status) {
    case COVERT_OK: return "ok";
    case COVERT_ERR_DOMAIN: return "domain";
    case COVERT_ERR_NUMERICAL: return "numerical";
    case COVERT_ERR_UNACHIEVABLE: return "unachievable";
    case COVERT_ERR_CONFIG: return "config";
    case COVERT_ERR_IO: return "io";
    case COVERT_ERR_INVALID_HANDLE: return "invalid_handle";
    }
    return "unknown";
}

const char* covert_last_error(void) { return g_last_error.c_str(); }

/* --- scalar wrappers --- */

covert_status covert_bob_threshold(double p_fa, int32_t m, int32_t n_rs, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::bob_threshold(p_fa, m, n_rs); });
}

covert_status covert_bob_fap(double eta_b, int32_t m, int32_t n_rs, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::bob_fap(eta_b, m, n_rs); });
}

covert_status covert_bob_mdp(double eta_b, double rho, int32_t m, int32_t n_rs, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::bob_mdp(eta_b, rho, m, n_rs); });
}

covert_status covert_f_m(double x, int32_t m, double p_fa, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::f_m(x, m, p_fa); });
}

covert_status covert_f_m_inv(double p, int32_t m, double p_fa, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::f_m_inv(p, m, p_fa); });
}

covert_status covert_min_transmit_power(double p_md, double p_fa, int32_t m, int32_t n_rs,
                                        double noise_power, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::min_transmit_power(p_md, p_fa, m, n_rs, noise_power); });
}

covert_status covert_willie_threshold(double p_fa, int32_t m, int32_t n, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::willie_threshold(p_fa, m, n); });
}

covert_status covert_willie_fap(double eta_w, int32_t m, int32_t n, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::willie_fap(eta_w, m, n); });
}

covert_status covert_willie_dp(double eta_w, double rho, int32_t m, int32_t n, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::willie_dp(eta_w, rho, m, n); });
}

covert_status covert_willie_dp_design(double p_fa, double p_md, int32_t m, int32_t n,
                                      double alpha, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::willie_dp_design(p_fa, p_md, m, n, alpha); });
}

covert_status covert_willie_dp_taylor(double p_fa, double p_md, int32_t m, int32_t n,
                                      double alpha, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::willie_dp_taylor(p_fa, p_md, m, n, alpha); });
}

covert_status covert_willie_dp_asymptotic(double p_fa, double p_md, int32_t m, int32_t n,
                                          double alpha, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = an::willie_dp_asymptotic(p_fa, p_md, m, n, alpha); });
}

covert_status covert_bob_exact_fap(double eta_b, int32_t m, int32_t n_rs, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = mc::bob_exact_fap_oracle(eta_b, m, n_rs); });
}

covert_status covert_willie_exact_fap(double eta_w, int32_t m, int32_t n, double* out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = mc::willie_exact_fap_oracle(eta_w, m, n); });
}

/* --- design and simulation --- */

covert_status covert_design_point(double p_fa, double p_md, int32_t n_total, double alpha,
                                  int32_t m, double noise_power, covert_design* out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto [params, thresholds] =
            hn::design_point({p_fa, p_md}, n_total, alpha, m, noise_power);
        out->params.n_total = params.n_total;
        out->params.n_rs = params.n_rs;
        out->params.m_antennas = params.m_antennas;
        out->params.noise_power = params.noise_power;
        out->params.tx_power = params.tx_power;
        out->params.alpha = params.alpha;
        out->eta_b = thresholds.eta_b;
        out->eta_w = thresholds.eta_w;
    });
}

covert_status covert_simulate_bob(const covert_params* params, double eta_b,
                                  const covert_sim_options* options, covert_empirical* out) {
    if (!params) return null_arg("params");
    if (!out) return null_arg("out");
    if (const covert_status st = check_sim_options(options); st != COVERT_OK) return st;
    return guarded([&] {
        an::Thresholds thresholds;
        thresholds.eta_b = eta_b;
        const auto rate = mc::run_bob_trials(
            to_system_params(*params), thresholds,
            options->hypothesis == 0 ? mc::Hypothesis::h0 : mc::Hypothesis::h1,
            {options->n_trials, options->seed, options->confidence}, options->threads);
        fill_empirical(*out, rate);
    });
}

covert_status covert_simulate_willie(const covert_params* params, double eta_w,
                                     const covert_sim_options* options,
                                     covert_empirical* out) {
    if (!params) return null_arg("params");
    if (!out) return null_arg("out");
    if (const covert_status st = check_sim_options(options); st != COVERT_OK) return st;
    return guarded([&] {
        an::Thresholds thresholds;
        thresholds.eta_w = eta_w;
        const auto rate = mc::run_willie_trials(
            to_system_params(*params), thresholds,
            options->hypothesis == 0 ? mc::Hypothesis::h0 : mc::Hypothesis::h1,
            {options->n_trials, options->seed, options->confidence}, options->threads);
        fill_empirical(*out, rate);
    });
}

/* --- sweeps --- */

covert_sweep* covert_sweep_new(void) {
    auto* sweep = new (std::nothrow) covert_sweep;
    if (!sweep) return nullptr;
    sweep->spec.values = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
    return sweep;
}

void covert_sweep_free(covert_sweep* sweep) {
    if (!valid(sweep)) return;
    sweep->magic = 0;
    delete sweep;
}

covert_status covert_sweep_set_base(covert_sweep* sweep, int32_t n_total, int32_t m,
                                    double alpha, double noise_power, double p_fa,
                                    double p_md) {
    if (!valid(sweep)) return bad_handle("sweep");
    sweep->spec.n_total = n_total;
    sweep->spec.m_antennas = m;
    sweep->spec.alpha = alpha;
    sweep->spec.noise_power = noise_power;
    sweep->spec.targets = {p_fa, p_md};
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_sweep_set_variable(covert_sweep* sweep, int32_t variable) {
    if (!valid(sweep)) return bad_handle("sweep");
    switch (variable) {
    case COVERT_SWEEP_FRAME_LENGTH:
        sweep->spec.swept_variable = hn::SweepSpec::Variable::frame_length_n;
        break;
    case COVERT_SWEEP_ANTENNAS:
        sweep->spec.swept_variable = hn::SweepSpec::Variable::antennas_m;
        break;
    default:
        return set_error(COVERT_ERR_CONFIG, "variable must be COVERT_SWEEP_FRAME_LENGTH (0) "
                                            "or COVERT_SWEEP_ANTENNAS (1)");
    }
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_sweep_set_values(covert_sweep* sweep, const int32_t* values,
                                      size_t count) {
    if (!valid(sweep)) return bad_handle("sweep");
    if (!values || count == 0) {
        return set_error(COVERT_ERR_CONFIG, "values must be a nonempty array");
    }
    return guarded([&] { sweep->spec.values.assign(values, values + count); });
}

covert_status covert_sweep_set_simulation(covert_sweep* sweep, uint64_t n_trials,
                                          uint64_t seed, double confidence, int32_t threads) {
    if (!valid(sweep)) return bad_handle("sweep");
    if (n_trials == 0) {
        return set_error(COVERT_ERR_CONFIG, "n_trials must be >= 1");
    }
    sweep->spec.plan = mc::TrialPlan{n_trials, seed, confidence};
    sweep->spec.threads = threads;
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_sweep_set_tx_power(covert_sweep* sweep, double tx_power) {
    if (!valid(sweep)) return bad_handle("sweep");
    if (!(tx_power > 0.0)) {
        return set_error(COVERT_ERR_CONFIG, "tx_power override must be positive");
    }
    sweep->spec.tx_power_override = tx_power;
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_sweep_run(covert_sweep* sweep, covert_results** out) {
    if (!valid(sweep)) return bad_handle("sweep");
    if (!out) return null_arg("out");
    return guarded([&] {
        auto rows = hn::run_sweep(sweep->spec);
        auto* results = new covert_results;
        results->rows = std::move(rows);
        *out = results;
    });
}

/* --- results --- */

void covert_results_free(covert_results* results) {
    if (!valid(results)) return;
    results->magic = 0;
    delete results;
}

covert_status covert_results_rows(const covert_results* results, size_t* out) {
    if (!valid(results)) return bad_handle("results");
    if (!out) return null_arg("out");
    *out = results->rows.size();
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_results_cols(const covert_results* results, size_t* out) {
    if (!valid(results)) return bad_handle("results");
    if (!out) return null_arg("out");
    *out = hn::result_columns().size();
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_results_column_name(const covert_results* results, size_t col,
                                         const char** out) {
    if (!valid(results)) return bad_handle("results");
    if (!out) return null_arg("out");
    const auto& cols = hn::result_columns();
    if (col >= cols.size()) {
        return set_error(COVERT_ERR_CONFIG, "column index out of range");
    }
    *out = cols[col].c_str();
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_results_cell(const covert_results* results, size_t row, size_t col,
                                  double* out) {
    if (!valid(results)) return bad_handle("results");
    if (!out) return null_arg("out");
    const auto& cols = hn::result_columns();
    if (row >= results->rows.size() || col >= cols.size()) {
        return set_error(COVERT_ERR_CONFIG, "row or column index out of range");
    }
    if (cols[col] == "error") {
        return set_error(COVERT_ERR_CONFIG,
                         "column 'error' is text; read it with covert_results_row_error");
    }
    *out = numeric_cell(results->rows[row], col);
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_results_row_error(const covert_results* results, size_t row,
                                       const char** out) {
    if (!valid(results)) return bad_handle("results");
    if (!out) return null_arg("out");
    if (row >= results->rows.size()) {
        return set_error(COVERT_ERR_CONFIG, "row index out of range");
    }
    *out = results->rows[row].error.c_str();
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_results_row_status(const covert_results* results, size_t row,
                                        covert_status* out) {
    if (!valid(results)) return bad_handle("results");
    if (!out) return null_arg("out");
    if (row >= results->rows.size()) {
        return set_error(COVERT_ERR_CONFIG, "row index out of range");
    }
    *out = static_cast<covert_status>(static_cast<int>(results->rows[row].error_code));
    g_last_error.clear();
    return COVERT_OK;
}

covert_status covert_results_to_csv(const covert_results* results, const char* path) {
    if (!valid(results)) return bad_handle("results");
    if (!path) return null_arg("path");
    return guarded([&] { hn::emit_csv(results->rows, std::string(path)); });
}

covert_status covert_results_format_csv(const covert_results* results, char** out) {
    if (!valid(results)) return bad_handle("results");
    if (!out) return null_arg("out");
    return guarded([&] {
        const std::string csv = hn::format_csv(results->rows);
        char* buf = static_cast<char*>(std::malloc(csv.size() + 1));
        if (!buf) throw std::bad_alloc();
        std::memcpy(buf, csv.c_str(), csv.size() + 1);
        *out = buf;
    });
}

void covert_string_free(char* s) { std::free(s); }

/* --- selfcheck --- */

covert_status covert_selfcheck(void (*line_cb)(const char* line, void* ctx), void* ctx,
                               int* failures) {
    return guarded([&] {
        const int n = hn::selfcheck([&](const std::string& line) {
            if (line_cb) line_cb(line.c_str(), ctx);
        });
        if (failures) *failures = n;
    });
}

} /* extern "C" */
