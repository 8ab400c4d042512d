#pragma once

#include <optional>
#include <string>

#include "isac6d/motion.hpp"

#include <nlohmann/json_fwd.hpp>

// Experiment configuration: JSON on disk (SI units, degrees where noted),
// radians and base SI units in memory. Defaults are filled at load time and
// echoed back by config_to_json so a report records exactly what ran.

namespace isac6d {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    OfdmGrid grid;
    ArrayGeometry hu_geom;  // transmit
    ArrayGeometry ru_geom;  // receive
    std::vector<TargetState> targets;
    std::optional<ClutterModel> clutter;
    double beam_power = 1.0;  // W
    double beam_rho = 1.0;    // sensing power fraction
    std::vector<double> snr_db;
    int trials = 1;
    std::uint64_t seed = 1;
    bool suppression = true;
    ChannelMode channel_mode = ChannelMode::six_d;

    EstimatorConfig estimator() const;
    void validate() const;
};

SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& cfg);

SimConfig load_config(const std::string& path);
void save_config(const std::string& path, const SimConfig& cfg);

// The desk-scale default used throughout: 8x8 transmit, 16x16 receive,
// N = M = 32 at 28 GHz / 480 kHz, one target at (120 m, 75 deg, 20 deg)
// moving at (15 m/s, 2 deg/s, 8 deg/s).
SimConfig desk_scale_config();

const char* channel_mode_name(ChannelMode m);
ChannelMode channel_mode_from_name(const std::string& s);

}  // namespace isac6d
