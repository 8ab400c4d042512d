#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "isac6d/harness.hpp"

using namespace isac6d;

namespace {

SimConfig tiny_config() {
    SimConfig cfg = desk_scale_config();
    cfg.grid.m_subcarriers = 16;
    cfg.grid.n_symbols = 16;
    cfg.ru_geom.nx = 8;
    cfg.ru_geom.nz = 8;
    cfg.trials = 3;
    cfg.snr_db = {20.0};
    return cfg;
}

}  // namespace

TEST_CASE("config loading") {
    SUBCASE("minimal config fills defaults") {
        const auto j = nlohmann::json::parse(R"({
            "grid": {"subcarriers": 16, "symbols": 16, "delta_f_hz": 480e3, "f0_hz": 28e9},
            "hu_upa": {"nx": 4, "nz": 4},
            "ru_upa": {"nx": 8, "nz": 8},
            "targets": [{"r_m": 100.0, "theta_deg": 90.0, "phi_deg": 0.0}],
            "snr_db": [10.0],
            "seed": 7
        })");
        const SimConfig cfg = config_from_json(j);
        CHECK(cfg.grid.t_guard == doctest::Approx(0.25 / 480e3));
        CHECK(cfg.ru_geom.spacing_d ==
              doctest::Approx(kSpeedOfLight / (2.0 * 28e9)).epsilon(1e-15));
        CHECK(cfg.trials == 1);
        CHECK(cfg.suppression == true);
        CHECK(cfg.channel_mode == ChannelMode::six_d);
        CHECK(cfg.targets[0].rcs == 1.0);
    }
    SUBCASE("half-wavelength violation is rejected with the invariant named") {
        auto j = nlohmann::json::parse(R"({
            "grid": {"subcarriers": 16, "symbols": 16, "delta_f_hz": 480e3, "f0_hz": 28e9},
            "hu_upa": {"nx": 4, "nz": 4},
            "ru_upa": {"nx": 8, "nz": 8},
            "spacing_d_m": 0.0107,
            "targets": [{"r_m": 100.0, "theta_deg": 90.0, "phi_deg": 0.0}],
            "snr_db": [10.0],
            "seed": 7
        })");
        try {
            config_from_json(j);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("half-wavelength") != std::string::npos);
        }
    }
    SUBCASE("missing seed is rejected") {
        auto j = nlohmann::json::parse(R"({
            "grid": {"subcarriers": 16, "symbols": 16, "delta_f_hz": 480e3, "f0_hz": 28e9},
            "hu_upa": {"nx": 4, "nz": 4},
            "ru_upa": {"nx": 8, "nz": 8},
            "targets": [{"r_m": 100.0, "theta_deg": 90.0, "phi_deg": 0.0}],
            "snr_db": [10.0]
        })");
        CHECK_THROWS_AS(config_from_json(j), ConfigError);
    }
    SUBCASE("baseline config round-trips through save/load") {
        const SimConfig cfg = desk_scale_config();
        const std::string path = "config_roundtrip_test.json";
        save_config(path, cfg);
        const SimConfig back = load_config(path);
        std::remove(path.c_str());
        CHECK(back.grid.m_subcarriers == cfg.grid.m_subcarriers);
        CHECK(back.grid.delta_f == cfg.grid.delta_f);
        CHECK(back.grid.t_guard == cfg.grid.t_guard);
        CHECK(back.ru_geom.spacing_d == cfg.ru_geom.spacing_d);
        CHECK(back.targets[0].position.r == cfg.targets[0].position.r);
        CHECK(back.targets[0].omega_phi == doctest::Approx(cfg.targets[0].omega_phi).epsilon(1e-15));
        CHECK(back.seed == cfg.seed);
        CHECK(config_to_json(back) == config_to_json(cfg));
    }
}

TEST_CASE("trial running") {
    const SimConfig cfg = tiny_config();
    const double inf = std::numeric_limits<double>::infinity();

    SUBCASE("bit-identical determinism") {
        const TrialResult a = run_trial(cfg, 10.0, 12345);
        const TrialResult b = run_trial(cfg, 10.0, 12345);
        REQUIRE(a.ok);
        REQUIRE(b.ok);
        CHECK(a.estimate.r_hat == b.estimate.r_hat);
        CHECK(a.estimate.theta_hat == b.estimate.theta_hat);
        CHECK(a.estimate.phi_hat == b.estimate.phi_hat);
        CHECK(a.estimate.v_r_hat == b.estimate.v_r_hat);
        CHECK(a.estimate.omega_theta_hat == b.estimate.omega_theta_hat);
        CHECK(a.estimate.omega_phi_hat == b.estimate.omega_phi_hat);
        CHECK(a.noise_sigma == b.noise_sigma);
    }
    SUBCASE("noiseless trial meets loose recovery tolerances") {
        const TrialResult r = run_trial(cfg, inf, 5);
        REQUIRE(r.ok);
        CHECK(r.noise_sigma == 0.0);
        const TargetState& t = cfg.targets.front();
        CHECK(std::abs(r.estimate.r_hat - t.position.r) < 0.2);
        CHECK(std::abs(r.estimate.theta_hat - t.position.theta) < deg2rad(0.05));
        CHECK(std::abs(r.estimate.phi_hat - t.position.phi) < deg2rad(0.05));
        CHECK(std::abs(r.estimate.v_r_hat - t.v_r) < 0.05);
    }
    SUBCASE("different seeds give different noise draws") {
        const TrialResult a = run_trial(cfg, 10.0, 1);
        const TrialResult b = run_trial(cfg, 10.0, 2);
        REQUIRE(a.ok);
        REQUIRE(b.ok);
        CHECK(a.estimate.r_hat != b.estimate.r_hat);
    }
    SUBCASE("range beyond the unambiguous bound warns") {
        SimConfig far = cfg;
        far.targets[0].position.r = 400.0;
        const TrialResult r = run_trial(far, inf, 1);
        REQUIRE(!r.warnings.empty());
        CHECK(r.warnings.front().find("unambiguous") != std::string::npos);
    }
}

TEST_CASE("sweep and report") {
    SUBCASE("zero-noise sweep stays within noiseless tolerances") {
        SimConfig cfg = tiny_config();
        cfg.snr_db = {std::numeric_limits<double>::infinity()};
        cfg.trials = 3;
        const RmseReport report = run_sweep(cfg);
        REQUIRE(report.rows.size() == 1);
        const RmseRow& row = report.rows[0];
        CHECK(row.failures == 0);
        CHECK(row.trials == 3);
        CHECK(row.rmse_r < 0.2);
        CHECK(row.rmse_theta_deg < 0.05);
        CHECK(row.rmse_phi_deg < 0.05);
        CHECK(row.rmse_v_r < 0.05);
    }
    SUBCASE("synthetic constant-error estimator reduces to |error|") {
        TargetState truth;
        truth.position = {100.0, deg2rad(90.0), 0.0};
        truth.v_r = 10.0;
        truth.rcs = 1.0;
        std::vector<TrialResult> results(4);
        for (auto& r : results) {
            r.ok = true;
            r.estimate.r_hat = truth.position.r + 0.25;
            r.estimate.theta_hat = truth.position.theta - deg2rad(0.5);
            r.estimate.phi_hat = truth.position.phi;
            r.estimate.v_r_hat = truth.v_r + 1.5;
            r.estimate.omega_theta_hat = 0.0;
            r.estimate.omega_phi_hat = 0.0;
        }
        const RmseRow row = reduce_trials(10.0, 42, truth, results);
        CHECK(row.rmse_r == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(row.rmse_theta_deg == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(row.rmse_v_r == doctest::Approx(1.5).epsilon(1e-12));
        CHECK(row.failures == 0);
    }
    SUBCASE("failed trials are counted and excluded") {
        TargetState truth;
        truth.position = {100.0, deg2rad(90.0), 0.0};
        truth.rcs = 1.0;
        std::vector<TrialResult> results(3);
        results[0].ok = true;
        results[0].estimate.r_hat = truth.position.r + 1.0;
        results[1].ok = false;
        results[2].ok = true;
        results[2].estimate.r_hat = truth.position.r + 1.0;
        results[2].estimate.omega_phi_hat = std::numeric_limits<double>::quiet_NaN();
        const RmseRow row = reduce_trials(0.0, 1, truth, results);
        CHECK(row.trials == 1);
        CHECK(row.failures == 2);
        CHECK(row.rmse_r == doctest::Approx(1.0));
    }
    SUBCASE("CSV round trip is numerically identical") {
        RmseReport report;
        report.config_echo = "{\"seed\":1}";
        RmseRow row;
        row.snr_db = 12.5;
        row.trials = 50;
        row.rmse_r = 0.03190000000000001;
        row.rmse_theta_deg = 2.5e-3;
        row.rmse_phi_deg = 1.7e-3;
        row.rmse_v_r = 2.7e-3;
        row.rmse_omega_theta_deg = 0.4562;
        row.rmse_omega_phi_deg = 0.3552;
        row.failures = 2;
        row.seed = 0xdeadbeefULL;
        report.rows = {row, row};
        report.rows[1].snr_db = 20.0;

        const std::string path = "report_roundtrip_test.csv";
        write_report(report, path);
        const RmseReport back = read_report(path);
        std::remove(path.c_str());

        REQUIRE(back.rows.size() == 2);
        CHECK(back.config_echo == report.config_echo);
        CHECK(back.rows[0].snr_db == row.snr_db);
        CHECK(back.rows[0].rmse_r == row.rmse_r);
        CHECK(back.rows[0].rmse_theta_deg == row.rmse_theta_deg);
        CHECK(back.rows[0].rmse_phi_deg == row.rmse_phi_deg);
        CHECK(back.rows[0].rmse_v_r == row.rmse_v_r);
        CHECK(back.rows[0].rmse_omega_theta_deg == row.rmse_omega_theta_deg);
        CHECK(back.rows[0].rmse_omega_phi_deg == row.rmse_omega_phi_deg);
        CHECK(back.rows[0].failures == row.failures);
        CHECK(back.rows[0].seed == row.seed);
    }
    SUBCASE("empty report writes a header-only file") {
        RmseReport report;
        const std::string path = "report_empty_test.csv";
        write_report(report, path);
        std::ifstream is(path);
        std::string header;
        REQUIRE(std::getline(is, header));
        // snr, trials, six RMSEs, failures, seed.
        CHECK(std::count(header.begin(), header.end(), ',') == 9);
        std::string extra;
        CHECK(!std::getline(is, extra));
        is.close();
        std::remove(path.c_str());
    }
    SUBCASE("seed lineage keeps cells distinct") {
        std::set<std::uint64_t> seen;
        for (std::uint64_t j = 0; j < 4; ++j)
            for (std::uint64_t i = 0; i < 64; ++i) seen.insert(mix_seed(1, j, i));
        CHECK(seen.size() == 4 * 64);
    }
}
