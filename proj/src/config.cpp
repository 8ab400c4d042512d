#include "isac6d/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace isac6d {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config error at " + path + ": " + why);
}

double require_number(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required key");
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& path, const std::string& key, double def) {
    if (!j.contains(key) || j.at(key).is_null()) return def;
    if (!j.at(key).is_number()) fail(path + "." + key, "expected a number");
    return j.at(key).get<double>();
}

int require_int(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) fail(path + "." + key, "missing required key");
    if (!j.at(key).is_number_integer()) fail(path + "." + key, "expected an integer");
    return j.at(key).get<int>();
}

}  // namespace

const char* channel_mode_name(ChannelMode m) {
    switch (m) {
        case ChannelMode::six_d: return "six_d";
        case ChannelMode::four_d: return "four_d";
        case ChannelMode::exact: return "exact";
    }
    return "six_d";
}

ChannelMode channel_mode_from_name(const std::string& s) {
    if (s == "six_d") return ChannelMode::six_d;
    if (s == "four_d") return ChannelMode::four_d;
    if (s == "exact") return ChannelMode::exact;
    throw ConfigError("config error at channel_mode: expected six_d, four_d, or exact");
}

EstimatorConfig SimConfig::estimator() const {
    EstimatorConfig ec;
    ec.rx_geom = ru_geom;
    ec.tx_geom = hu_geom;
    ec.grid = grid;
    ec.suppression = suppression;
    return ec;
}

void SimConfig::validate() const {
    try {
        grid.validate();
    } catch (const std::exception& e) {
        fail("grid", e.what());
    }
    try {
        hu_geom.validate();
    } catch (const std::exception& e) {
        fail("hu_upa", e.what());
    }
    try {
        ru_geom.validate();
    } catch (const std::exception& e) {
        fail("ru_upa", e.what());
    }
    if (targets.empty()) fail("targets", "at least one target required");
    for (size_t i = 0; i < targets.size(); ++i) {
        try {
            targets[i].validate();
        } catch (const std::exception& e) {
            fail("targets[" + std::to_string(i) + "]", e.what());
        }
    }
    if (clutter) {
        try {
            clutter->validate();
        } catch (const std::exception& e) {
            fail("clutter", e.what());
        }
    }
    if (!(beam_power > 0.0)) fail("beam.power_w", "must be positive");
    if (!(beam_rho > 0.0 && beam_rho <= 1.0)) fail("beam.rho", "must be in (0, 1]");
    if (trials < 1) fail("trials", "must be >= 1");
    if (snr_db.empty()) fail("snr_db", "at least one SNR point required");
}

SimConfig config_from_json(const json& j) {
    SimConfig cfg;

    if (!j.contains("grid")) fail("grid", "missing required section");
    const json& g = j.at("grid");
    cfg.grid.m_subcarriers = require_int(g, "grid", "subcarriers");
    cfg.grid.n_symbols = require_int(g, "grid", "symbols");
    cfg.grid.delta_f = require_number(g, "grid", "delta_f_hz");
    cfg.grid.f0 = require_number(g, "grid", "f0_hz");
    if (!(cfg.grid.delta_f > 0.0)) fail("grid.delta_f_hz", "must be positive");
    cfg.grid.t_guard = number_or(g, "grid", "guard_s", 0.25 / cfg.grid.delta_f);

    const double default_d = kSpeedOfLight / (2.0 * cfg.grid.f0);
    const double d = number_or(j, "", "spacing_d_m", default_d);

    auto read_upa = [&](const char* key) {
        if (!j.contains(key)) fail(key, "missing required section");
        ArrayGeometry geom;
        geom.nx = require_int(j.at(key), key, "nx");
        geom.nz = require_int(j.at(key), key, "nz");
        geom.spacing_d = d;
        geom.f0 = cfg.grid.f0;
        return geom;
    };
    cfg.hu_geom = read_upa("hu_upa");
    cfg.ru_geom = read_upa("ru_upa");

    if (!j.contains("targets") || !j.at("targets").is_array())
        fail("targets", "missing required array");
    size_t ti = 0;
    for (const auto& tj : j.at("targets")) {
        const std::string path = "targets[" + std::to_string(ti++) + "]";
        TargetState t;
        t.position.r = require_number(tj, path, "r_m");
        t.position.theta = deg2rad(require_number(tj, path, "theta_deg"));
        t.position.phi = deg2rad(require_number(tj, path, "phi_deg"));
        t.v_r = number_or(tj, path, "v_r_mps", 0.0);
        t.omega_theta = deg2rad(number_or(tj, path, "omega_theta_degps", 0.0));
        t.omega_phi = deg2rad(number_or(tj, path, "omega_phi_degps", 0.0));
        t.rcs = number_or(tj, path, "rcs_m2", 1.0);
        cfg.targets.push_back(t);
    }

    if (j.contains("clutter") && !j.at("clutter").is_null()) {
        const json& cj = j.at("clutter");
        ClutterModel cm;
        const std::string mode = cj.value("mode", "gaussian");
        if (mode == "gaussian") {
            cm.mode = ClutterModel::Mode::gaussian;
            cm.beta_c = require_number(cj, "clutter", "beta_c");
        } else if (mode == "scatterers") {
            cm.mode = ClutterModel::Mode::explicit_scatterers;
            if (!cj.contains("scatterers") || !cj.at("scatterers").is_array())
                fail("clutter.scatterers", "missing required array");
            size_t si = 0;
            for (const auto& sj : cj.at("scatterers")) {
                const std::string path = "clutter.scatterers[" + std::to_string(si++) + "]";
                ClutterScatterer sc;
                sc.position.r = require_number(sj, path, "r_m");
                sc.position.theta = deg2rad(require_number(sj, path, "theta_deg"));
                sc.position.phi = deg2rad(require_number(sj, path, "phi_deg"));
                sc.rcs = number_or(sj, path, "rcs_m2", 1.0);
                cm.scatterers.push_back(sc);
            }
        } else {
            fail("clutter.mode", "expected gaussian or scatterers");
        }
        cfg.clutter = cm;
    }

    if (j.contains("beam")) {
        cfg.beam_power = number_or(j.at("beam"), "beam", "power_w", 1.0);
        cfg.beam_rho = number_or(j.at("beam"), "beam", "rho", 1.0);
    }

    if (!j.contains("snr_db")) fail("snr_db", "missing required key");
    if (j.at("snr_db").is_array())
        cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
    else if (j.at("snr_db").is_number())
        cfg.snr_db = {j.at("snr_db").get<double>()};
    else
        fail("snr_db", "expected a number or array of numbers");

    cfg.trials = j.value("trials", 1);
    if (!j.contains("seed")) fail("seed", "missing required key (no ambient entropy)");
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.suppression = j.value("suppression", true);
    cfg.channel_mode = channel_mode_from_name(j.value("channel_mode", "six_d"));

    cfg.validate();
    return cfg;
}

json config_to_json(const SimConfig& cfg) {
    json j;
    j["grid"] = {{"subcarriers", cfg.grid.m_subcarriers},
                 {"symbols", cfg.grid.n_symbols},
                 {"delta_f_hz", cfg.grid.delta_f},
                 {"f0_hz", cfg.grid.f0},
                 {"guard_s", cfg.grid.t_guard}};
    j["hu_upa"] = {{"nx", cfg.hu_geom.nx}, {"nz", cfg.hu_geom.nz}};
    j["ru_upa"] = {{"nx", cfg.ru_geom.nx}, {"nz", cfg.ru_geom.nz}};
    j["spacing_d_m"] = cfg.ru_geom.spacing_d;
    j["targets"] = json::array();
    for (const auto& t : cfg.targets) {
        j["targets"].push_back({{"r_m", t.position.r},
                                {"theta_deg", rad2deg(t.position.theta)},
                                {"phi_deg", rad2deg(t.position.phi)},
                                {"v_r_mps", t.v_r},
                                {"omega_theta_degps", rad2deg(t.omega_theta)},
                                {"omega_phi_degps", rad2deg(t.omega_phi)},
                                {"rcs_m2", t.rcs}});
    }
    if (cfg.clutter) {
        json cj;
        if (cfg.clutter->mode == ClutterModel::Mode::gaussian) {
            cj["mode"] = "gaussian";
            cj["beta_c"] = cfg.clutter->beta_c;
        } else {
            cj["mode"] = "scatterers";
            cj["scatterers"] = json::array();
            for (const auto& s : cfg.clutter->scatterers)
                cj["scatterers"].push_back({{"r_m", s.position.r},
                                            {"theta_deg", rad2deg(s.position.theta)},
                                            {"phi_deg", rad2deg(s.position.phi)},
                                            {"rcs_m2", s.rcs}});
        }
        j["clutter"] = cj;
    }
    j["beam"] = {{"power_w", cfg.beam_power}, {"rho", cfg.beam_rho}};
    j["snr_db"] = cfg.snr_db;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.seed;
    j["suppression"] = cfg.suppression;
    j["channel_mode"] = channel_mode_name(cfg.channel_mode);
    return j;
}

SimConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config error: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config error: invalid JSON in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::string& path, const SimConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw ConfigError("config error: cannot write " + path);
    os << config_to_json(cfg).dump(2) << "\n";
}

SimConfig desk_scale_config() {
    SimConfig cfg;
    cfg.grid.m_subcarriers = 32;
    cfg.grid.n_symbols = 32;
    cfg.grid.delta_f = 480e3;
    cfg.grid.f0 = 28e9;
    cfg.grid.t_guard = 0.25 / cfg.grid.delta_f;
    const double d = kSpeedOfLight / (2.0 * cfg.grid.f0);
    cfg.hu_geom = {8, 8, d, cfg.grid.f0};
    cfg.ru_geom = {16, 16, d, cfg.grid.f0};
    TargetState t;
    t.position = {120.0, deg2rad(75.0), deg2rad(20.0)};
    t.v_r = 15.0;
    t.omega_theta = deg2rad(2.0);
    t.omega_phi = deg2rad(8.0);
    t.rcs = 1.0;
    cfg.targets = {t};
    cfg.snr_db = {0.0, 10.0, 20.0};
    cfg.trials = 50;
    cfg.seed = 1;
    return cfg;
}

}  // namespace isac6d
