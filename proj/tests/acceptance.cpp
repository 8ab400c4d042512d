// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria 2 and 3 share one Monte Carlo sweep.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "isac6d/harness.hpp"

using namespace isac6d;

namespace {

struct Gate {
    int failures = 0;

    void run(const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        const auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", name.c_str(), secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// Column-wise monotone non-increasing check with at most one inversion not
// exceeding 10% of the preceding value.
bool monotone_with_tolerance(const std::vector<double>& v, std::string& why) {
    int inversions = 0;
    for (size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[i - 1]) {
            ++inversions;
            if (inversions > 1 || v[i] > 1.10 * v[i - 1]) {
                why = fmt("%.4g -> %.4g", v[i - 1], v[i]);
                return false;
            }
        }
    }
    return true;
}

double max_phase_discrepancy(const ChannelMatrix& a, const ChannelMatrix& b) {
    double worst = 0.0;
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            worst = std::max(worst, std::abs(std::arg(a(r, c) / b(r, c))));
    return worst;
}

// Averaged periodogram argmax on a 2^16 grid via the covariance lag sums.
double periodogram_argmax(const Eigen::MatrixXcd& y) {
    const int l = static_cast<int>(y.rows());
    const Eigen::MatrixXcd r = covariance(y);
    std::vector<std::complex<double>> lag(static_cast<size_t>(l), 0.0);
    for (int k = 0; k < l; ++k)
        for (int i = 0; i + k < l; ++i) lag[static_cast<size_t>(k)] += r(i + k, i);
    const int nfft = 1 << 16;
    double best_p = -1.0, best_w = 0.0;
    for (int bin = 0; bin < nfft; ++bin) {
        const double w = 2.0 * kPi * bin / nfft;
        double p = std::real(lag[0]);
        for (int k = 1; k < l; ++k)
            p += 2.0 * std::real(lag[static_cast<size_t>(k)] * std::polar(1.0, -w * k));
        if (p > best_p) {
            best_p = p;
            best_w = w;
        }
    }
    return std::atan2(std::sin(best_w), std::cos(best_w));
}

}  // namespace

int main() {
    Gate gate;
    const double inf = std::numeric_limits<double>::infinity();

    // ---- 1. Noiseless end-to-end recovery -------------------------------
    gate.run("criterion 1: noiseless end-to-end recovery", [&](std::string& detail) {
        const SimConfig cfg = desk_scale_config();
        const TrialResult res = run_trial(cfg, inf, mix_seed(cfg.seed, 0, 0));
        if (!res.ok) {
            detail = res.error;
            return false;
        }
        const TargetState& t = cfg.targets.front();
        const double err_r = std::abs(res.estimate.r_hat - t.position.r);
        const double err_th = rad2deg(std::abs(res.estimate.theta_hat - t.position.theta));
        const double err_ph = rad2deg(std::abs(res.estimate.phi_hat - t.position.phi));
        const double err_v = std::abs(res.estimate.v_r_hat - t.v_r);
        const double err_wt = rad2deg(std::abs(res.estimate.omega_theta_hat - t.omega_theta));
        const double err_wp = rad2deg(std::abs(res.estimate.omega_phi_hat - t.omega_phi));
        detail = fmt("|dr|=%.2g m |dtheta|=%.2g deg |dphi|=%.2g deg |dv|=%.2g m/s "
                     "|dwt|=%.2g deg/s |dwp|=%.2g deg/s",
                     err_r, err_th, err_ph, err_v, err_wt, err_wp);
        return err_r <= 0.1 && err_th <= 0.05 && err_ph <= 0.05 && err_v <= 0.05 &&
               err_wt <= 0.5 && err_wp <= 0.5;
    });

    // ---- 2 & 3. RMSE sweep: monotonicity and the 0->20 dB contraction ---
    RmseReport sweep_report;
    gate.run("criterion 2: RMSE monotone over {0, 10, 20} dB (50 trials)",
             [&](std::string& detail) {
                 SimConfig cfg = desk_scale_config();
                 cfg.trials = 50;
                 cfg.snr_db = {0.0, 10.0, 20.0};
                 sweep_report = run_sweep(cfg);
                 const auto& rows = sweep_report.rows;
                 if (rows.size() != 3) return false;
                 auto col = [&](auto getter) {
                     std::vector<double> v;
                     for (const auto& r : rows) v.push_back(getter(r));
                     return v;
                 };
                 const std::vector<std::pair<std::string, std::vector<double>>> cols = {
                     {"r", col([](const RmseRow& r) { return r.rmse_r; })},
                     {"theta", col([](const RmseRow& r) { return r.rmse_theta_deg; })},
                     {"phi", col([](const RmseRow& r) { return r.rmse_phi_deg; })},
                     {"v_r", col([](const RmseRow& r) { return r.rmse_v_r; })},
                     {"w_theta", col([](const RmseRow& r) { return r.rmse_omega_theta_deg; })},
                     {"w_phi", col([](const RmseRow& r) { return r.rmse_omega_phi_deg; })},
                 };
                 int failures_total = 0;
                 for (const auto& row : rows) failures_total += row.failures;
                 detail = fmt("failures=%d;", failures_total);
                 bool ok = true;
                 for (const auto& [name, v] : cols) {
                     std::string why;
                     const bool mono = monotone_with_tolerance(v, why);
                     detail += fmt(" %s: %.3g/%.3g/%.3g%s", name.c_str(), v[0], v[1], v[2],
                                   mono ? "" : (" INVERTED " + why).c_str());
                     ok = ok && mono;
                 }
                 return ok;
             });

    gate.run("criterion 3: each RMSE contracts at least 3x from 0 dB to 20 dB",
             [&](std::string& detail) {
                 if (sweep_report.rows.size() != 3) {
                     detail = "sweep unavailable";
                     return false;
                 }
                 const RmseRow& lo = sweep_report.rows.front();
                 const RmseRow& hi = sweep_report.rows.back();
                 const std::pair<std::string, std::pair<double, double>> ratios[] = {
                     {"r", {lo.rmse_r, hi.rmse_r}},
                     {"theta", {lo.rmse_theta_deg, hi.rmse_theta_deg}},
                     {"phi", {lo.rmse_phi_deg, hi.rmse_phi_deg}},
                     {"v_r", {lo.rmse_v_r, hi.rmse_v_r}},
                     {"w_theta", {lo.rmse_omega_theta_deg, hi.rmse_omega_theta_deg}},
                     {"w_phi", {lo.rmse_omega_phi_deg, hi.rmse_omega_phi_deg}},
                 };
                 bool ok = true;
                 for (const auto& [name, pair] : ratios) {
                     const double ratio = pair.first / pair.second;
                     detail += fmt("%s=%.1fx ", name.c_str(), ratio);
                     ok = ok && ratio >= 3.0;
                 }
                 return ok;
             });

    // ---- 4. Channel-model consistency ------------------------------------
    gate.run("criterion 4: exact vs factored channel phase consistency",
             [&](std::string& detail) {
                 const SimConfig desk = desk_scale_config();
                 const double d = desk.ru_geom.spacing_d;
                 const ArrayGeometry g16{16, 16, d, desk.grid.f0};
                 TargetState t = desk.targets.front();
                 std::vector<double> errs;
                 for (double r : {50.0, 100.0, 200.0, 400.0}) {
                     t.position.r = r;
                     const ChannelMatrix exact =
                         exact_path_channel(g16, g16, t, 0, 0, desk.grid);
                     const ChannelMatrix fact =
                         factored_channel(g16, g16, t, 0, 0, desk.grid, ChannelMode::six_d);
                     errs.push_back(max_phase_discrepancy(exact, fact));
                 }
                 bool monotone = true;
                 for (size_t i = 1; i < errs.size(); ++i)
                     monotone = monotone && errs[i] < errs[i - 1];
                 detail = fmt("max phase err: 50m=%.3g 100m=%.3g 200m=%.3g 400m=%.3g rad; "
                              "monotone=%s; bound at 200m: 1e-2",
                              errs[0], errs[1], errs[2], errs[3], monotone ? "yes" : "no");
                 return monotone && errs[2] <= 1e-2;
             });

    // ---- 5. Plane-model forward/inverse identity -------------------------
    gate.run("criterion 5: plane forward/inverse identity on 1000 states",
             [&](std::string& detail) {
                 const SimConfig desk = desk_scale_config();
                 const double d = desk.ru_geom.spacing_d;
                 auto eng = make_engine(2024);
                 std::uniform_real_distribution<double> ur(50.0, 300.0), uth(0.15, kPi - 0.15),
                     uph(-1.35, 1.35), uv(-30.0, 30.0), uw(-0.35, 0.35);
                 double worst = 0.0;
                 for (int i = 0; i < 1000; ++i) {
                     TargetState s;
                     s.position = {ur(eng), uth(eng), uph(eng)};
                     s.v_r = uv(eng);
                     s.omega_theta = uw(eng);
                     s.omega_phi = uw(eng);
                     s.rcs = 1.0;
                     const PlaneCoeffs pc = plane_coeffs_forward(s, desk.hu_geom, d);
                     const RecoveredVelocities rec =
                         recover_velocities(pc, s.position.theta, s.position.phi, desk.hu_geom, d);
                     const double scale = std::max(
                         {1.0, std::abs(s.v_r), std::abs(s.omega_theta), std::abs(s.omega_phi)});
                     worst = std::max({worst, std::abs(rec.v_r - s.v_r) / scale,
                                       std::abs(rec.omega_theta - s.omega_theta) / scale,
                                       std::abs(rec.omega_phi - s.omega_phi) / scale});
                 }
                 detail = fmt("worst relative error %.3g (bound 1e-9)", worst);
                 return worst < 1e-9;
             });

    // ---- 6. ESPRIT vs periodogram oracle ---------------------------------
    gate.run("criterion 6: ESPRIT agrees with the periodogram oracle at 20 dB",
             [&](std::string& detail) {
                 const int l = 16, s = 64;
                 const double sigma = std::sqrt(std::pow(10.0, -20.0 / 10.0));
                 auto eng = make_engine(616);
                 std::uniform_real_distribution<double> uk(-0.95 * kPi, 0.95 * kPi);
                 double sq_sum = 0.0, worst = 0.0;
                 for (int trial = 0; trial < 100; ++trial) {
                     const double kappa = uk(eng);
                     Eigen::MatrixXcd y(l, s);
                     for (int col = 0; col < s; ++col) {
                         const std::complex<double> src = complex_normal(eng, 1.0);
                         for (int row = 0; row < l; ++row)
                             y(row, col) = std::polar(1.0, kappa * row) * src +
                                           complex_normal(eng, sigma * sigma);
                     }
                     const double k_esprit = esprit_space_values(y, 1).values.front();
                     const double k_fft = periodogram_argmax(y);
                     const double diff = k_esprit - k_fft;
                     const double dev = std::abs(std::atan2(std::sin(diff), std::cos(diff)));
                     sq_sum += dev * dev;
                     worst = std::max(worst, dev);
                 }
                 const double rms = std::sqrt(sq_sum / 100.0);
                 detail = fmt("rms deviation %.3g rad (bound 1e-3), per-instance max %.3g", rms,
                              worst);
                 return rms <= 1e-3;
             });

    // ---- 7. Clutter suppression under 10x clutter ------------------------
    gate.run("criterion 7: clutter suppression and relaxed recovery at 20 dB",
             [&](std::string& detail) {
                 SimConfig cfg = desk_scale_config();
                 const TargetState& t = cfg.targets.front();

                 // Calibrate the clutter power regulation factor to ten times
                 // the per-entry target power.
                 const SymbolFrame symbols =
                     random_qpsk_frame(cfg.grid.n_symbols, cfg.grid.m_subcarriers, 1);
                 const Eigen::VectorXcd beam =
                     tx_beam(cfg.hu_geom, t.position.theta, t.position.phi, cfg.beam_power,
                             cfg.beam_rho);
                 Scene target_only;
                 target_only.targets = {t};
                 target_only.tx_geom = cfg.hu_geom;
                 target_only.rx_geom = cfg.ru_geom;
                 target_only.grid = cfg.grid;
                 const EchoTensor target_eec = erase_symbols(
                     synthesize_scene(target_only, beam, symbols, 0.0, 0), symbols);
                 const double target_power = mean_entry_power(target_eec);
                 ClutterModel cm;
                 cm.mode = ClutterModel::Mode::gaussian;
                 cm.beta_c = std::sqrt(10.0 * target_power / (cfg.beam_power * cfg.beam_rho));

                 // Static residual after the zero-Doppler projection.
                 const ClutterFrame frame(cm, cfg.ru_geom, cfg.hu_geom, cfg.grid, 9);
                 Scene clutter_only;
                 clutter_only.clutter = &frame;
                 clutter_only.tx_geom = cfg.hu_geom;
                 clutter_only.rx_geom = cfg.ru_geom;
                 clutter_only.grid = cfg.grid;
                 const EchoTensor clutter_eec = erase_symbols(
                     synthesize_scene(clutter_only, beam, symbols, 0.0, 0), symbols);
                 const double before = clutter_eec.energy();
                 const double after = suppress_clutter(clutter_eec).energy();
                 const double reduction_db =
                     (after > 0.0) ? 10.0 * std::log10(before / after) : 300.0;
                 const double ratio = mean_entry_power(clutter_eec) / target_power;

                 // Full pipeline with clutter at 20 dB, criterion-1 tolerances x10.
                 cfg.clutter = cm;
                 bool recovered = true;
                 double worst_v = 0.0;
                 for (int trial = 0; trial < 5; ++trial) {
                     const TrialResult res =
                         run_trial(cfg, 20.0, mix_seed(cfg.seed, 7, trial));
                     if (!res.ok) {
                         recovered = false;
                         break;
                     }
                     const double err_r = std::abs(res.estimate.r_hat - t.position.r);
                     const double err_th =
                         rad2deg(std::abs(res.estimate.theta_hat - t.position.theta));
                     const double err_ph =
                         rad2deg(std::abs(res.estimate.phi_hat - t.position.phi));
                     const double err_v = std::abs(res.estimate.v_r_hat - t.v_r);
                     const double err_wt =
                         rad2deg(std::abs(res.estimate.omega_theta_hat - t.omega_theta));
                     const double err_wp =
                         rad2deg(std::abs(res.estimate.omega_phi_hat - t.omega_phi));
                     worst_v = std::max(worst_v, err_v);
                     recovered = recovered && err_r <= 1.0 && err_th <= 0.5 && err_ph <= 0.5 &&
                                 err_v <= 0.5 && err_wt <= 5.0 && err_wp <= 5.0;
                 }
                 detail = fmt("clutter/target power %.1fx, static reduction %.0f dB "
                              "(bound 30), worst |dv|=%.3g m/s over 5 trials",
                              ratio, reduction_db, worst_v);
                 return reduction_db >= 30.0 && recovered;
             });

    // ---- 8. Sensitivity direction checks ---------------------------------
    gate.run("criterion 8: doubling N, M, or N_R^z reduces RMSE_vr and RMSE_wphi",
             [&](std::string& detail) {
                 auto cell = [&](int n, int m, int rz) {
                     SimConfig cfg = desk_scale_config();
                     cfg.grid.n_symbols = n;
                     cfg.grid.m_subcarriers = m;
                     cfg.ru_geom.nz = rz;
                     cfg.trials = 50;
                     cfg.snr_db = {10.0};
                     const RmseReport rep = run_sweep(cfg);
                     return std::make_pair(rep.rows[0].rmse_v_r,
                                           rep.rows[0].rmse_omega_phi_deg);
                 };
                 const auto base = cell(32, 32, 16);
                 const auto big_n = cell(64, 32, 16);
                 const auto big_m = cell(32, 64, 16);
                 const auto big_rz = cell(32, 32, 32);
                 detail = fmt("v_r: base=%.4g N=%.4g M=%.4g Rz=%.4g | w_phi: base=%.4g "
                              "N=%.4g M=%.4g Rz=%.4g",
                              base.first, big_n.first, big_m.first, big_rz.first, base.second,
                              big_n.second, big_m.second, big_rz.second);
                 return big_n.first < base.first && big_m.first < base.first &&
                        big_rz.first < base.first && big_n.second < base.second &&
                        big_m.second < base.second && big_rz.second < base.second;
             });

    std::printf("%d of 8 criteria failed\n", gate.failures);
    return gate.failures == 0 ? 0 : 1;
}
