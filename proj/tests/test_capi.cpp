#include "doctest.h"

#include <covert/covert.h>

#include "analytic.hpp"
#include "harness.hpp"
#include "montecarlo.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace an = covert::analytic;

TEST_CASE("version and status names") {
    const std::string version = covert_version();
    CHECK(version.find('.') != std::string::npos);
    CHECK(std::string(covert_status_name(COVERT_OK)) == "ok");
    CHECK(std::string(covert_status_name(COVERT_ERR_DOMAIN)) == "domain");
    CHECK(std::string(covert_status_name(COVERT_ERR_UNACHIEVABLE)) == "unachievable");
    CHECK(std::string(covert_status_name(COVERT_ERR_INVALID_HANDLE)) == "invalid_handle");
}

TEST_CASE("scalar wrappers agree with the core library") {
    double v = 0.0;
    REQUIRE(covert_bob_threshold(1e-3, 16, 128, &v) == COVERT_OK);
    CHECK(v == an::bob_threshold(1e-3, 16, 128));
    REQUIRE(covert_bob_fap(v, 16, 128, &v) == COVERT_OK);
    CHECK(v == doctest::Approx(1e-3).epsilon(1e-9));

    REQUIRE(covert_willie_threshold(1e-3, 16, 256, &v) == COVERT_OK);
    CHECK(v == an::willie_threshold(1e-3, 16, 256));
    double fap = 0.0;
    REQUIRE(covert_willie_fap(v, 16, 256, &fap) == COVERT_OK);
    CHECK(fap == doctest::Approx(1e-3).epsilon(1e-9));
    double dp = 0.0;
    REQUIRE(covert_willie_dp(v, 0.1, 16, 256, &dp) == COVERT_OK);
    CHECK(dp == an::willie_dp(v, 0.1, 16, 256));

    REQUIRE(covert_f_m(0.5, 16, 1e-3, &v) == COVERT_OK);
    CHECK(v == doctest::Approx(0.05387821884281459).epsilon(1e-8));
    REQUIRE(covert_f_m_inv(1e-3, 16, 1e-3, &v) == COVERT_OK);
    CHECK(v == doctest::Approx(0.25776952540069165).epsilon(1e-8));
    REQUIRE(covert_min_transmit_power(1e-3, 1e-3, 16, 128, 1.0, &v) == COVERT_OK);
    CHECK(v == an::min_transmit_power(1e-3, 1e-3, 16, 128, 1.0));

    REQUIRE(covert_willie_dp_design(1e-3, 1e-3, 16, 256, 0.5, &v) == COVERT_OK);
    CHECK(v == doctest::Approx(0.12496590234018945).epsilon(1e-8));
    REQUIRE(covert_willie_dp_taylor(1e-3, 1e-3, 16, 256, 0.5, &v) == COVERT_OK);
    CHECK(v == an::willie_dp_taylor(1e-3, 1e-3, 16, 256, 0.5));
    REQUIRE(covert_willie_dp_asymptotic(1e-3, 1e-3, 16, 256, 0.5, &v) == COVERT_OK);
    CHECK(v == an::willie_dp_asymptotic(1e-3, 1e-3, 16, 256, 0.5));

    REQUIRE(covert_bob_mdp(0.015, 0.03, 16, 128, &v) == COVERT_OK);
    CHECK(v == doctest::Approx(an::bob_mdp(0.015, 0.03, 16, 128)).epsilon(1e-12));
    REQUIRE(covert_bob_exact_fap(0.015, 16, 128, &v) == COVERT_OK);
    CHECK(v == covert::mc::bob_exact_fap_oracle(0.015, 16, 128));
    REQUIRE(covert_willie_exact_fap(0.05, 16, 256, &v) == COVERT_OK);
    CHECK(v == covert::mc::willie_exact_fap_oracle(0.05, 16, 256));
}

TEST_CASE("error mapping and thread-local messages") {
    double v = 0.0;
    CHECK(covert_bob_mdp(0.5, -1.0, 4, 32, &v) == COVERT_ERR_DOMAIN);
    CHECK(std::strlen(covert_last_error()) > 0);
    CHECK(covert_bob_threshold(1e-3, 16, 128, &v) == COVERT_OK);
    CHECK(std::strlen(covert_last_error()) == 0); // cleared by success

    CHECK(covert_bob_threshold(1e-3, 16, 128, nullptr) == COVERT_ERR_CONFIG);

    covert_design design;
    CHECK(covert_design_point(1e-3, 1e-3, 100, 0.333, 16, 1.0, &design) ==
          COVERT_ERR_CONFIG);
    CHECK(covert_design_point(1e-9, 1e-3, 8, 0.5, 1, 1.0, &design) ==
          COVERT_ERR_UNACHIEVABLE);
}

TEST_CASE("design point round-trip") {
    covert_design design;
    REQUIRE(covert_design_point(1e-3, 1e-3, 256, 0.5, 16, 1.0, &design) == COVERT_OK);
    CHECK(design.params.n_total == 256);
    CHECK(design.params.n_rs == 128);
    CHECK(design.params.m_antennas == 16);
    CHECK(design.params.alpha == 0.5);
    CHECK(design.params.tx_power ==
          doctest::Approx(0.03030808233772322).epsilon(1e-9));
    CHECK(design.eta_b == an::bob_threshold(1e-3, 16, 128));
    CHECK(design.eta_w == an::willie_threshold(1e-3, 16, 256));
}

TEST_CASE("simulation wrappers match the native engines") {
    covert_design design;
    REQUIRE(covert_design_point(1e-2, 1e-2, 64, 0.5, 4, 1.0, &design) == COVERT_OK);

    covert_sim_options options{};
    options.n_trials = 1500;
    options.seed = 99;
    options.confidence = 0.99;
    options.threads = 1;
    options.hypothesis = 1;

    covert_empirical empirical{};
    REQUIRE(covert_simulate_bob(&design.params, design.eta_b, &options, &empirical) ==
            COVERT_OK);
    const auto [params, thresholds] =
        covert::harness::design_point({1e-2, 1e-2}, 64, 0.5, 4, 1.0);
    const auto native = covert::mc::run_bob_trials(
        params, thresholds, covert::mc::Hypothesis::h1, {1500, 99, 0.99}, 1);
    CHECK(empirical.events == native.events);
    CHECK(empirical.trials == native.trials);
    CHECK(empirical.estimate == native.estimate);
    CHECK(empirical.ci_low == native.ci_low);
    CHECK(empirical.ci_high == native.ci_high);

    options.hypothesis = 0;
    REQUIRE(covert_simulate_willie(&design.params, design.eta_w, &options, &empirical) ==
            COVERT_OK);
    const auto native_w = covert::mc::run_willie_trials(
        params, thresholds, covert::mc::Hypothesis::h0, {1500, 99, 0.99}, 1);
    CHECK(empirical.events == native_w.events);

    options.hypothesis = 7;
    CHECK(covert_simulate_bob(&design.params, design.eta_b, &options, &empirical) ==
          COVERT_ERR_CONFIG);
    options.hypothesis = 0;
    CHECK(covert_simulate_bob(nullptr, design.eta_b, &options, &empirical) ==
          COVERT_ERR_CONFIG);
}

TEST_CASE("sweep handle lifecycle") {
    covert_sweep* sweep = covert_sweep_new();
    REQUIRE(sweep != nullptr);
    REQUIRE(covert_sweep_set_base(sweep, 256, 16, 0.5, 1.0, 1e-3, 1e-3) == COVERT_OK);
    REQUIRE(covert_sweep_set_variable(sweep, COVERT_SWEEP_FRAME_LENGTH) == COVERT_OK);
    const int32_t values[] = {64, 128};
    REQUIRE(covert_sweep_set_values(sweep, values, 2) == COVERT_OK);

    covert_results* results = nullptr;
    REQUIRE(covert_sweep_run(sweep, &results) == COVERT_OK);
    REQUIRE(results != nullptr);

    size_t rows = 0, cols = 0;
    CHECK(covert_results_rows(results, &rows) == COVERT_OK);
    CHECK(covert_results_cols(results, &cols) == COVERT_OK);
    CHECK(rows == 2);
    CHECK(cols == 34);

    const char* name = nullptr;
    CHECK(covert_results_column_name(results, 0, &name) == COVERT_OK);
    CHECK(std::string(name) == "n_total");
    CHECK(covert_results_column_name(results, 99, &name) == COVERT_ERR_CONFIG);

    double cell = 0.0;
    CHECK(covert_results_cell(results, 0, 0, &cell) == COVERT_OK);
    CHECK(cell == 64.0);
    CHECK(covert_results_cell(results, 1, 1, &cell) == COVERT_OK);
    CHECK(cell == 64.0); // n_rs of the second row (alpha = 0.5 of 128)
    CHECK(covert_results_cell(results, 0, 19, &cell) == COVERT_OK);
    CHECK(std::isnan(cell)); // no simulation attached
    CHECK(covert_results_cell(results, 0, 33, &cell) == COVERT_ERR_CONFIG); // error col
    CHECK(covert_results_cell(results, 5, 0, &cell) == COVERT_ERR_CONFIG);

    const char* row_error = nullptr;
    CHECK(covert_results_row_error(results, 0, &row_error) == COVERT_OK);
    CHECK(std::string(row_error).empty());
    covert_status row_status = COVERT_ERR_IO;
    CHECK(covert_results_row_status(results, 0, &row_status) == COVERT_OK);
    CHECK(row_status == COVERT_OK);

    char* csv = nullptr;
    REQUIRE(covert_results_format_csv(results, &csv) == COVERT_OK);
    REQUIRE(csv != nullptr);
    CHECK(std::string(csv).rfind("n_total,", 0) == 0);
    covert_string_free(csv);

    covert_results_free(results);
    covert_sweep_free(sweep);
}

TEST_CASE("per-point failures surface through row status") {
    covert_sweep* sweep = covert_sweep_new();
    REQUIRE(sweep != nullptr);
    REQUIRE(covert_sweep_set_base(sweep, 256, 16, 0.3, 1.0, 1e-3, 1e-3) == COVERT_OK);
    const int32_t values[] = {64, 100}; // 19.2 fails, 30 works
    REQUIRE(covert_sweep_set_values(sweep, values, 2) == COVERT_OK);
    covert_results* results = nullptr;
    REQUIRE(covert_sweep_run(sweep, &results) == COVERT_OK);

    const char* row_error = nullptr;
    covert_status row_status = COVERT_OK;
    CHECK(covert_results_row_error(results, 0, &row_error) == COVERT_OK);
    CHECK(std::string(row_error).find("integer") != std::string::npos);
    CHECK(covert_results_row_status(results, 0, &row_status) == COVERT_OK);
    CHECK(row_status == COVERT_ERR_CONFIG);
    CHECK(covert_results_row_status(results, 1, &row_status) == COVERT_OK);
    CHECK(row_status == COVERT_OK);

    covert_results_free(results);
    covert_sweep_free(sweep);
}

TEST_CASE("sweep configuration errors") {
    covert_sweep* sweep = covert_sweep_new();
    REQUIRE(sweep != nullptr);
    CHECK(covert_sweep_set_variable(sweep, 5) == COVERT_ERR_CONFIG);
    CHECK(covert_sweep_set_values(sweep, nullptr, 3) == COVERT_ERR_CONFIG);
    CHECK(covert_sweep_set_simulation(sweep, 0, 1, 0.99, 0) == COVERT_ERR_CONFIG);
    CHECK(covert_sweep_set_tx_power(sweep, -2.0) == COVERT_ERR_CONFIG);
    const int32_t bad_order[] = {128, 64};
    REQUIRE(covert_sweep_set_values(sweep, bad_order, 2) == COVERT_OK);
    covert_results* results = nullptr;
    CHECK(covert_sweep_run(sweep, &results) == COVERT_ERR_CONFIG);
    CHECK(results == nullptr);
    covert_sweep_free(sweep);
}

TEST_CASE("invalid handles are rejected, null frees are no-ops") {
    covert_sweep_free(nullptr);
    covert_results_free(nullptr);

    size_t n = 0;
    CHECK(covert_results_rows(nullptr, &n) == COVERT_ERR_INVALID_HANDLE);
    covert_results* results = nullptr;
    CHECK(covert_sweep_run(nullptr, &results) == COVERT_ERR_INVALID_HANDLE);

    // A zeroed buffer is never a live handle (the magic tag cannot match).
    alignas(16) unsigned char zeros[128] = {};
    CHECK(covert_results_rows(reinterpret_cast<covert_results*>(zeros), &n) ==
          COVERT_ERR_INVALID_HANDLE);
    CHECK(covert_sweep_set_tx_power(reinterpret_cast<covert_sweep*>(zeros), 1.0) ==
          COVERT_ERR_INVALID_HANDLE);
}

TEST_CASE("selfcheck through the C API") {
    // The full suite runs in its own test; here just verify the plumbing with
    // a counting callback on the real run.
    struct Ctx {
        int lines = 0;
    } ctx;
    int failures = -1;
    const covert_status status = covert_selfcheck(
        [](const char* line, void* raw) {
            auto* c = static_cast<Ctx*>(raw);
            if (line && line[0] != '\0') ++c->lines;
        },
        &ctx, &failures);
    CHECK(status == COVERT_OK);
    CHECK(failures == 0);
    CHECK(ctx.lines >= 20);
}
