#ifndef COVERT_HARNESS_HPP
#define COVERT_HARNESS_HPP

#include "analytic.hpp"
#include "errors.hpp"
#include "montecarlo.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Experiment orchestration: resolving a fully-specified operating point from
// detection targets, sweeping frame length or antenna count (optionally with
// Monte Carlo columns), CSV emission, and the executable invariant suite
// behind the CLI's `selfcheck`.

namespace covert::harness {

struct DetectionTargets {
    double p_fa = 1e-3;
    double p_md = 1e-3;
};

struct SweepSpec {
    enum class Variable { frame_length_n, antennas_m };

    Variable swept_variable = Variable::frame_length_n;
    std::vector<int> values;     // nonempty, strictly ascending, positive

    // Fixed scenario minus the swept field.
    int n_total = 256;
    int m_antennas = 16;
    double alpha = 0.5;
    double noise_power = 1.0;

    DetectionTargets targets;

    // Analytic-only when absent; when present, four empirical rates are
    // estimated per row (Bob FAP/MDP, Willie FAP/DP).
    std::optional<mc::TrialPlan> plan;

    // Transmit power override (otherwise the design power is used).
    std::optional<double> tx_power_override;

    int threads = 0; // <= 0: COVERT_THREADS env var / hardware concurrency
};

// One output row: resolved inputs, analytic outputs, exact H0 oracles, and
// (when a plan is present) empirical rates with Wilson intervals. Absent
// numeric cells are NaN and serialize as empty CSV fields.
struct ResultRow {
    // inputs (doubles are NaN until filled; see ResultRow())
    int n_total = 0;
    int n_rs = 0;
    double alpha;
    int m_antennas = 0;
    double noise_power;
    double tx_power;
    double rho;
    double p_fa;
    double p_md;
    double eta_b;
    double eta_w;
    // analytic outputs
    double bob_fap;
    double bob_mdp;
    double willie_fap;
    double willie_dp_design;
    double willie_dp_taylor;
    double willie_dp_asymptotic;
    // exact H0 oracles at the row's thresholds
    double bob_fap_oracle;
    double willie_fap_oracle;
    // empirical outputs (NaN when analytic-only)
    double bob_fap_emp, bob_fap_ci_low, bob_fap_ci_high;
    double bob_mdp_emp, bob_mdp_ci_low, bob_mdp_ci_high;
    double willie_fap_emp, willie_fap_ci_low, willie_fap_ci_high;
    double willie_dp_emp, willie_dp_ci_low, willie_dp_ci_high;
    std::uint64_t trials = 0;     // 0 = analytic-only (empty cells)
    std::uint64_t seed = 0;       // master seed (emitted only with trials)
    std::string error;            // per-point failure, row otherwise partial
    errc error_code = errc::ok;   // class of `error` (not a CSV column)

    bool tx_overridden = false;   // design-power recheck is skipped when set

    ResultRow();
};

// Column names, in emission order (snake_case; stable).
const std::vector<std::string>& result_columns();

// Resolves a complete operating point: n_rs = alpha * n_total (must be an
// integer), Bob/Willie thresholds at targets.p_fa, and the minimum transmit
// power meeting targets.p_md. Throws covert::config_error for inconsistent
// configuration and covert::unachievable_error if Bob's threshold saturates
// (eta_b >= 1: the missed-detection target cannot be met at any power).
std::pair<analytic::SystemParams, analytic::Thresholds>
design_point(const DetectionTargets& targets, int n_total, double alpha, int m,
             double noise_power);

// One row per swept value, in order. Per-point failures are recorded in the
// row's `error` field (remaining cells empty) and the sweep continues.
std::vector<ResultRow> run_sweep(const SweepSpec& spec);

// Writes UTF-8 CSV: exact header, probabilities with 17 significant digits
// (round-trip exact), empty cells for absent values. Rechecks every clean
// row's derivation invariants before writing; violations throw
// covert::config_error, I/O failures covert::io_error (with the path).
void emit_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::string format_csv(const std::vector<ResultRow>& rows);

// Runs the full invariant suite (special-function identities, analytic
// closures, small Monte Carlo oracle checks), reporting one line per check
// through `report`. Returns the number of failed checks.
int selfcheck(const std::function<void(const std::string&)>& report);

} // namespace covert::harness

#endif // COVERT_HARNESS_HPP
