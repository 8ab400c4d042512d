#include "isac6d/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace isac6d {

namespace {

// Sub-stream tags within one trial.
enum SeedTag : std::uint64_t {
    kSymbolsTag = 1,
    kSwerlingTag = 2,
    kClutterTag = 3,
    kNoiseTag = 4,
};

std::vector<TargetState> draw_swerling(const SimConfig& cfg, std::uint64_t trial_seed) {
    auto eng = make_engine(mix_seed(trial_seed, kSwerlingTag));
    std::vector<TargetState> drawn = cfg.targets;
    for (auto& t : drawn) t.rcs = rayleigh_amplitude(eng, t.rcs * t.rcs);
    return drawn;
}

EchoTensor consumed_stage(EchoTensor t, const SimConfig& cfg) {
    if (cfg.suppression) return suppress_clutter(std::move(t));
    return t;
}

EchoTensor synthesize_noiseless_reference(const SimConfig& cfg,
                                          const std::vector<TargetState>& drawn,
                                          const SymbolFrame& symbols,
                                          const Eigen::VectorXcd& beam) {
    Scene scene;
    scene.targets = {drawn.front()};
    scene.clutter = nullptr;
    scene.tx_geom = cfg.hu_geom;
    scene.rx_geom = cfg.ru_geom;
    scene.grid = cfg.grid;
    scene.mode = cfg.channel_mode;
    EchoTensor raw = synthesize_scene(scene, beam, symbols, 0.0, 0);
    return consumed_stage(erase_symbols(std::move(raw), symbols), cfg);
}

}  // namespace

SymbolFrame trial_symbols(const SimConfig& cfg, std::uint64_t trial_seed) {
    return random_qpsk_frame(cfg.grid.n_symbols, cfg.grid.m_subcarriers,
                             mix_seed(trial_seed, kSymbolsTag));
}

double noise_sigma_for_snr(const SimConfig& cfg, double snr_db, std::uint64_t trial_seed) {
    if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
    const auto drawn = draw_swerling(cfg, trial_seed);
    const SymbolFrame symbols = trial_symbols(cfg, trial_seed);
    const auto& aim = cfg.targets.front().position;
    const Eigen::VectorXcd beam =
        tx_beam(cfg.hu_geom, aim.theta, aim.phi, cfg.beam_power, cfg.beam_rho);
    const double p_ref =
        mean_entry_power(synthesize_noiseless_reference(cfg, drawn, symbols, beam));
    return std::sqrt(p_ref / std::pow(10.0, snr_db / 10.0));
}

TrialResult run_trial(const SimConfig& cfg, double snr_db, std::uint64_t trial_seed) {
    TrialResult res;
    res.trial_seed = trial_seed;

    for (size_t i = 0; i < cfg.targets.size(); ++i)
        if (cfg.targets[i].position.r >= cfg.grid.unambiguous_range())
            res.warnings.push_back("targets[" + std::to_string(i) +
                                   "]: range exceeds the unambiguous bound " +
                                   std::to_string(cfg.grid.unambiguous_range()) +
                                   " m, distance estimate will alias");

    const auto drawn = draw_swerling(cfg, trial_seed);
    const SymbolFrame symbols = trial_symbols(cfg, trial_seed);
    const auto& aim = cfg.targets.front().position;
    const Eigen::VectorXcd beam =
        tx_beam(cfg.hu_geom, aim.theta, aim.phi, cfg.beam_power, cfg.beam_rho);

    const double p_ref =
        mean_entry_power(synthesize_noiseless_reference(cfg, drawn, symbols, beam));
    res.noise_sigma = (std::isinf(snr_db) && snr_db > 0.0)
                          ? 0.0
                          : std::sqrt(p_ref / std::pow(10.0, snr_db / 10.0));

    ClutterFrame clutter;
    Scene scene;
    scene.targets = drawn;
    if (cfg.clutter) {
        clutter = ClutterFrame(*cfg.clutter, cfg.ru_geom, cfg.hu_geom, cfg.grid,
                               mix_seed(trial_seed, kClutterTag));
        scene.clutter = &clutter;
    }
    scene.tx_geom = cfg.hu_geom;
    scene.rx_geom = cfg.ru_geom;
    scene.grid = cfg.grid;
    scene.mode = cfg.channel_mode;

    EchoTensor raw = synthesize_scene(scene, beam, symbols, res.noise_sigma,
                                      mix_seed(trial_seed, kNoiseTag));
    try {
        res.estimate = estimate_6d(std::move(raw), cfg.estimator(), &symbols);
        res.ok = true;
    } catch (const std::exception& e) {
        res.error = e.what();
        res.ok = false;
    }
    return res;
}

RmseRow reduce_trials(double snr_db, std::uint64_t config_seed, const TargetState& truth,
                      const std::vector<TrialResult>& results) {
    RmseRow row;
    row.snr_db = snr_db;
    row.seed = config_seed;
    double se[6] = {0, 0, 0, 0, 0, 0};
    int ok = 0;
    for (const TrialResult& r : results) {
        const double err[6] = {
            r.estimate.r_hat - truth.position.r,
            r.estimate.theta_hat - truth.position.theta,
            r.estimate.phi_hat - truth.position.phi,
            r.estimate.v_r_hat - truth.v_r,
            r.estimate.omega_theta_hat - truth.omega_theta,
            r.estimate.omega_phi_hat - truth.omega_phi,
        };
        bool finite = r.ok;
        for (double e : err) finite = finite && std::isfinite(e);
        if (!finite) {
            ++row.failures;
            continue;
        }
        ++ok;
        for (int k = 0; k < 6; ++k) se[k] += err[k] * err[k];
    }
    row.trials = ok;
    if (ok > 0) {
        row.rmse_r = std::sqrt(se[0] / ok);
        row.rmse_theta_deg = rad2deg(std::sqrt(se[1] / ok));
        row.rmse_phi_deg = rad2deg(std::sqrt(se[2] / ok));
        row.rmse_v_r = std::sqrt(se[3] / ok);
        row.rmse_omega_theta_deg = rad2deg(std::sqrt(se[4] / ok));
        row.rmse_omega_phi_deg = rad2deg(std::sqrt(se[5] / ok));
    }
    return row;
}

RmseReport run_sweep(const SimConfig& cfg) {
    RmseReport report;
    report.config_echo = config_to_json(cfg).dump();
    const TargetState& truth = cfg.targets.front();

    for (size_t j = 0; j < cfg.snr_db.size(); ++j) {
        std::vector<TrialResult> results(static_cast<size_t>(cfg.trials));
        // Per-trial seeds make the reduction independent of scheduling.
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < cfg.trials; ++i) {
            const std::uint64_t seed =
                mix_seed(cfg.seed, static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(i));
            results[static_cast<size_t>(i)] = run_trial(cfg, cfg.snr_db[j], seed);
        }

        report.rows.push_back(reduce_trials(cfg.snr_db[j], cfg.seed, truth, results));
    }
    return report;
}

void write_report(const RmseReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_report: cannot open " + path);
    if (!report.config_echo.empty()) os << "# config " << report.config_echo << "\n";
    os << "snr_db,trials,rmse_r_m,rmse_theta_deg,rmse_phi_deg,rmse_v_r_mps,"
          "rmse_omega_theta_degps,rmse_omega_phi_degps,failures,seed\n";
    char buf[512];
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%llu\n", r.snr_db,
                      r.trials, r.rmse_r, r.rmse_theta_deg, r.rmse_phi_deg, r.rmse_v_r,
                      r.rmse_omega_theta_deg, r.rmse_omega_phi_deg, r.failures,
                      static_cast<unsigned long long>(r.seed));
        os << buf;
    }
    if (!os) throw std::runtime_error("write_report: write failed for " + path);
}

RmseReport read_report(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_report: cannot open " + path);
    RmseReport report;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# config ", 0) == 0) {
            report.config_echo = line.substr(9);
            continue;
        }
        if (line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        RmseRow r;
        unsigned long long seed = 0;
        if (std::sscanf(line.c_str(), "%lg,%d,%lg,%lg,%lg,%lg,%lg,%lg,%d,%llu", &r.snr_db,
                        &r.trials, &r.rmse_r, &r.rmse_theta_deg, &r.rmse_phi_deg, &r.rmse_v_r,
                        &r.rmse_omega_theta_deg, &r.rmse_omega_phi_deg, &r.failures,
                        &seed) != 10)
            throw std::runtime_error("read_report: malformed row: " + line);
        r.seed = seed;
        report.rows.push_back(r);
    }
    return report;
}

}  // namespace isac6d
