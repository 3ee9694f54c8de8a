// covertsim — command-line front end for the covert-link analyzer.
//
// Talks to the core exclusively through the C API (covert/covert.h), the same
// surface other language bindings would use. Subcommands:
//
//   analytic   closed-form outputs for one operating point
//   simulate   the same point plus Monte Carlo columns
//   sweep      a table over frame length N or antenna count M
//   selfcheck  the library's built-in verification suite
//
// Exit codes: 0 success, 1 computation/check failure, 2 usage or
// configuration error. Worker threads are controlled by the COVERT_THREADS
// environment variable (default: all hardware threads).

#include <covert/covert.h>

#include "CLI11.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct BaseOptions {
    double p_fa = 1e-3;
    double p_md = 1e-3;
    int m = 16;
    int n = 256;
    double alpha = 0.5;
    double noise_power = 1.0;
    std::optional<double> snr_db;
    std::string out_path;
    std::string params_path;
};

struct SimOptions {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    double confidence = 0.99;
};

void add_base_options(CLI::App* cmd, BaseOptions& opts) {
    cmd->add_option("--pfa", opts.p_fa, "False-alarm probability target")
        ->capture_default_str();
    cmd->add_option("--pmd", opts.p_md, "Missed-detection probability target")
        ->capture_default_str();
    cmd->add_option("--m", opts.m, "Receive antennas M")->capture_default_str();
    cmd->add_option("--n", opts.n, "Frame length N in samples")->capture_default_str();
    cmd->add_option("--alpha", opts.alpha,
                    "Reference-sequence fraction N_RS/N (alpha*N must be an integer)")
        ->capture_default_str();
    cmd->add_option("--noise-power", opts.noise_power, "Per-sample noise power, linear")
        ->capture_default_str();
    cmd->add_option("--snr-db", opts.snr_db,
                    "Force the per-sample SNR (dB); transmit power becomes "
                    "noise-power * 10^(snr/10) instead of the design minimum");
    cmd->add_option("--out", opts.out_path, "Write the CSV here instead of stdout");
    cmd->add_option("--params", opts.params_path,
                    "Read key = value lines (keys mirror the flag names) for any "
                    "flag not given explicitly");
}

void add_sim_options(CLI::App* cmd, SimOptions& opts, bool show_trials_default) {
    auto* trials = cmd->add_option("--trials", opts.trials, "Monte Carlo trials per rate");
    if (show_trials_default) trials->capture_default_str();
    cmd->add_option("--seed", opts.seed, "Master seed for the trial generator")
        ->capture_default_str();
    cmd->add_option("--confidence", opts.confidence, "Wilson confidence-interval level")
        ->capture_default_str();
}

// Applies `key = value` lines from a --params file to every option of `cmd`
// the command line left untouched (explicit flags win). Keys mirror the long
// flag names without the leading dashes; blank lines and #-comments are
// skipped. Values go through the same converters and validators as the
// flags. Returns the process exit code, 0 on success.
int apply_params_file(CLI::App* cmd, const std::string& path) {
    std::ifstream file(path);
    if (!file) {
        std::fprintf(stderr, "covertsim: --params: cannot open %s\n", path.c_str());
        return 2;
    }
    const auto trim = [](const std::string& text) {
        const auto first = text.find_first_not_of(" \t\r");
        const auto last = text.find_last_not_of(" \t\r");
        return first == std::string::npos ? std::string{}
                                          : text.substr(first, last - first + 1);
    };
    std::string line;
    for (int line_no = 1; std::getline(file, line); ++line_no) {
        const std::string entry = trim(line);
        if (entry.empty() || entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "covertsim: %s line %d: expected key = value\n",
                         path.c_str(), line_no);
            return 2;
        }
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        CLI::Option* opt = key.empty() || key == "params"
                               ? nullptr
                               : cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            std::fprintf(stderr, "covertsim: %s line %d: unknown key '%s'\n",
                         path.c_str(), line_no, key.c_str());
            return 2;
        }
        if (opt->count() > 0) continue;
        try {
            opt->add_result(value);
            opt->run_callback();
        } catch (const CLI::Error& e) {
            std::fprintf(stderr, "covertsim: %s line %d: %s\n", path.c_str(), line_no,
                         e.what());
            return 2;
        }
    }
    return 0;
}

int exit_code_for(covert_status status) {
    return (status == COVERT_ERR_CONFIG || status == COVERT_ERR_DOMAIN) ? 2 : 1;
}

int report_error(covert_status status) {
    std::fprintf(stderr, "covertsim: error (%s): %s\n", covert_status_name(status),
                 covert_last_error());
    return exit_code_for(status);
}

// Builds, runs, and emits one sweep. `values` has a single entry for the
// analytic/simulate point commands. Per-point failures become stderr warnings
// and land in the CSV error column; the run only fails if every point failed.
int run_table(const BaseOptions& base, int variable, const std::vector<int>& values,
              const SimOptions* sim) {
    covert_sweep* sweep = covert_sweep_new();
    if (!sweep) {
        std::fprintf(stderr, "covertsim: out of memory\n");
        return 1;
    }
    covert_results* results = nullptr;
    const auto cleanup = [&] {
        covert_results_free(results);
        covert_sweep_free(sweep);
    };
    const auto checked = [&](covert_status status) {
        if (status != COVERT_OK) {
            cleanup();
            return true;
        }
        return false;
    };

    covert_status status = covert_sweep_set_base(sweep, base.n, base.m, base.alpha,
                                                 base.noise_power, base.p_fa, base.p_md);
    if (checked(status)) return report_error(status);
    status = covert_sweep_set_variable(sweep, variable);
    if (checked(status)) return report_error(status);
    status = covert_sweep_set_values(sweep, values.data(), values.size());
    if (checked(status)) return report_error(status);
    if (sim) {
        status = covert_sweep_set_simulation(sweep, sim->trials, sim->seed, sim->confidence,
                                             /*threads=*/0);
        if (checked(status)) return report_error(status);
        std::fprintf(stderr,
                     "covertsim: %zu point(s), 4 empirical rates x %" PRIu64
                     " trials each (seed %" PRIu64 ", %g confidence)\n",
                     values.size(), sim->trials, sim->seed, sim->confidence);
    }
    if (base.snr_db) {
        const double tx_power = base.noise_power * std::pow(10.0, *base.snr_db / 10.0);
        status = covert_sweep_set_tx_power(sweep, tx_power);
        if (checked(status)) return report_error(status);
    }

    status = covert_sweep_run(sweep, &results);
    if (checked(status)) return report_error(status);

    size_t n_rows = 0;
    covert_results_rows(results, &n_rows);
    size_t n_failed = 0;
    int failed_exit = 1;
    for (size_t i = 0; i < n_rows; ++i) {
        const char* row_error = "";
        covert_results_row_error(results, i, &row_error);
        if (row_error[0] != '\0') {
            ++n_failed;
            covert_status row_status = COVERT_OK;
            covert_results_row_status(results, i, &row_status);
            if (n_failed == 1) failed_exit = exit_code_for(row_status);
            std::fprintf(stderr, "covertsim: point %zu failed: %s\n", i, row_error);
        }
    }

    if (!base.out_path.empty()) {
        status = covert_results_to_csv(results, base.out_path.c_str());
        if (checked(status)) return report_error(status);
        std::fprintf(stderr, "covertsim: wrote %zu row(s) to %s\n", n_rows,
                     base.out_path.c_str());
    } else {
        char* csv = nullptr;
        status = covert_results_format_csv(results, &csv);
        if (checked(status)) return report_error(status);
        std::fputs(csv, stdout);
        covert_string_free(csv);
    }
    cleanup();
    return (n_failed == n_rows && n_rows > 0) ? failed_exit : 0;
}

int run_selfcheck() {
    int failures = 0;
    const covert_status status = covert_selfcheck(
        [](const char* line, void*) { std::printf("%s\n", line); }, nullptr, &failures);
    if (status != COVERT_OK) return report_error(status);
    if (failures > 0) {
        std::fprintf(stderr, "covertsim: selfcheck: %d check(s) failed\n", failures);
        return 1;
    }
    std::fprintf(stderr, "covertsim: selfcheck: all checks passed\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covert random-access link analyzer: closed-form detection and covertness "
                 "performance, with a sample-level Monte Carlo cross-check"};
    app.require_subcommand(1);
    app.set_version_flag("--version", covert_version());

    BaseOptions analytic_base;
    auto* analytic = app.add_subcommand(
        "analytic", "Closed-form outputs for one operating point (CSV, one row)");
    add_base_options(analytic, analytic_base);

    BaseOptions simulate_base;
    SimOptions simulate_sim;
    auto* simulate = app.add_subcommand(
        "simulate", "One operating point with Monte Carlo columns (CSV, one row)");
    add_base_options(simulate, simulate_base);
    add_sim_options(simulate, simulate_sim, /*show_trials_default=*/true);

    BaseOptions sweep_base;
    SimOptions sweep_sim;
    std::string sweep_var = "n";
    std::vector<int> sweep_values;
    auto* sweep = app.add_subcommand(
        "sweep", "Table over frame length N or antenna count M (analytic-only unless "
                 "--trials is given)");
    add_base_options(sweep, sweep_base);
    sweep->add_option("--var", sweep_var, "Swept variable")
        ->check(CLI::IsMember({"n", "m"}))
        ->capture_default_str();
    sweep->add_option("--values", sweep_values,
                      "Swept values, comma separated (default: n: 64..8192 doubling, "
                      "m: 2..64 doubling)")
        ->delimiter(',');
    auto* sweep_trials = sweep->add_option("--trials", sweep_sim.trials,
                                           "Monte Carlo trials per rate (enables simulation)");
    sweep->add_option("--seed", sweep_sim.seed, "Master seed for the trial generator")
        ->capture_default_str();
    sweep->add_option("--confidence", sweep_sim.confidence, "Wilson confidence-interval level")
        ->capture_default_str();

    auto* selfcheck = app.add_subcommand(
        "selfcheck", "Run the library's built-in verification suite (one line per check)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* active = analytic->parsed()   ? analytic
                       : simulate->parsed() ? simulate
                       : sweep->parsed()    ? sweep
                                            : nullptr;
    BaseOptions* active_base = analytic->parsed()   ? &analytic_base
                               : simulate->parsed() ? &simulate_base
                               : sweep->parsed()    ? &sweep_base
                                                    : nullptr;
    if (active != nullptr && !active_base->params_path.empty()) {
        const int rc = apply_params_file(active, active_base->params_path);
        if (rc != 0) return rc;
    }

    if (analytic->parsed()) {
        return run_table(analytic_base, COVERT_SWEEP_FRAME_LENGTH, {analytic_base.n},
                         nullptr);
    }
    if (simulate->parsed()) {
        return run_table(simulate_base, COVERT_SWEEP_FRAME_LENGTH, {simulate_base.n},
                         &simulate_sim);
    }
    if (sweep->parsed()) {
        const int variable =
            sweep_var == "n" ? COVERT_SWEEP_FRAME_LENGTH : COVERT_SWEEP_ANTENNAS;
        if (sweep_values.empty()) {
            sweep_values = variable == COVERT_SWEEP_FRAME_LENGTH
                               ? std::vector<int>{64, 128, 256, 512, 1024, 2048, 4096, 8192}
                               : std::vector<int>{2, 4, 8, 16, 32, 64};
        }
        const bool with_sim = sweep_trials->count() > 0;
        return run_table(sweep_base, variable, sweep_values, with_sim ? &sweep_sim : nullptr);
    }
    if (selfcheck->parsed()) {
        return run_selfcheck();
    }
    return 2; // unreachable: require_subcommand(1)
}
