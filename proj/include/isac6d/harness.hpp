#pragma once

#include "isac6d/config.hpp"

// Deterministic Monte Carlo driver. Trial i at SNR index j runs on
// seed = mix_seed(config.seed, j, i); trials may execute on any number of
// workers and reduce in (j, i) order, so the report is a pure function of
// the config.

namespace isac6d {

struct TrialResult {
    bool ok = false;
    Estimate6D estimate;
    std::string error;  // failing step + message when !ok
    std::vector<std::string> warnings;
    double noise_sigma = 0.0;
    std::uint64_t trial_seed = 0;
};

// Noise level realizing the documented SNR definition: the mean per-entry
// power of the trial's noiseless first-target tensor, taken at the stage the
// estimator consumes (dt_eec with suppression on, eec otherwise), divided by
// 10^(snr/10). Infinite SNR turns noise off.
double noise_sigma_for_snr(const SimConfig& cfg, double snr_db, std::uint64_t trial_seed);

// The symbol frame a trial draws from its seed; also how a dumped raw tensor
// (whose header carries the trial seed) gets its symbols back.
SymbolFrame trial_symbols(const SimConfig& cfg, std::uint64_t trial_seed);

// One synthesize -> estimate run; estimation failures are captured in the
// result, not thrown.
TrialResult run_trial(const SimConfig& cfg, double snr_db, std::uint64_t trial_seed);

struct RmseRow {
    double snr_db = 0.0;
    int trials = 0;
    double rmse_r = 0.0;                // m
    double rmse_theta_deg = 0.0;        // deg
    double rmse_phi_deg = 0.0;          // deg
    double rmse_v_r = 0.0;              // m/s
    double rmse_omega_theta_deg = 0.0;  // deg/s
    double rmse_omega_phi_deg = 0.0;    // deg/s
    int failures = 0;                   // excluded from the RMSEs
    std::uint64_t seed = 0;             // config seed echo
};

struct RmseReport {
    std::vector<RmseRow> rows;
    std::string config_echo;  // canonical JSON of the config that ran
};

// Reduce one SNR cell's trial results into an RMSE row (failures excluded,
// counted separately). Exposed so synthetic estimators can be fed through
// the exact reduction the sweep uses.
RmseRow reduce_trials(double snr_db, std::uint64_t config_seed, const TargetState& truth,
                      const std::vector<TrialResult>& results);

RmseReport run_sweep(const SimConfig& cfg);

// CSV: '#' comment lines carry the config echo, then a header row naming
// units, then one row per SNR at full precision.
void write_report(const RmseReport& report, const std::string& path);
RmseReport read_report(const std::string& path);

}  // namespace isac6d
