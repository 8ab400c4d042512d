#include "isac6d/motion.hpp"

#include <algorithm>
#include <cmath>

namespace isac6d {

namespace {

// MDL-driven ESPRIT with the standard fallback: a singular TLS partition is
// retried at order 1.
SpaceValueSet run_esprit(const Eigen::MatrixXcd& y, const EstimatorConfig& cfg,
                         const std::string& step, std::vector<std::string>& flags) {
    try {
        return esprit_space_values(y, std::nullopt, cfg.mdl_max_sources);
    } catch (const SingularSubspaceError&) {
        flags.push_back(step + ": singular TLS partition, retried with order 1");
        return esprit_space_values(y, 1);
    }
}

double dominant_value(const SpaceValueSet& sv, const std::string& step,
                      std::vector<std::string>& flags) {
    if (sv.count == 0) throw NoTargetError(step);
    if (sv.count > 1)
        flags.push_back(step + ": model order " + std::to_string(sv.count) +
                        ", using dominant space value");
    return sv.values.front();
}

void require_erased(const EchoTensor& t, const std::string& step) {
    if (t.stage() == TensorStage::raw)
        throw PipelineError(step, "tensor must be symbol-erased first");
}

constexpr double kSddRangeTol = 1e-2;  // flag threshold for |SDD| > 1

}  // namespace

double notched_tone_space_value(double omega, int n_symbols) {
    const int n = n_symbols;
    // u = tone - mean(tone); TLS shift fit between u[0:n-1) and u[1:n).
    std::vector<std::complex<double>> u(static_cast<size_t>(n));
    std::complex<double> mean = 0.0;
    for (int i = 0; i < n; ++i) {
        u[static_cast<size_t>(i)] = std::polar(1.0, omega * i);
        mean += u[static_cast<size_t>(i)];
    }
    mean /= static_cast<double>(n);
    for (auto& v : u) v -= mean;

    double a11 = 0.0, a22 = 0.0;
    std::complex<double> a12 = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        a11 += std::norm(u[static_cast<size_t>(i)]);
        a22 += std::norm(u[static_cast<size_t>(i + 1)]);
        a12 += std::conj(u[static_cast<size_t>(i)]) * u[static_cast<size_t>(i + 1)];
    }
    const double tr = a11 + a22;
    const double disc = std::sqrt((a11 - a22) * (a11 - a22) + 4.0 * std::norm(a12));
    const double lam_minor = 0.5 * (tr - disc);
    // Minor eigenvector [x, y] with x = -a12, y = a11 - lam; shift = -x/y.
    const std::complex<double> shift = a12 / std::complex<double>(a11 - lam_minor, 0.0);
    return std::atan2(shift.imag(), shift.real());
}

namespace {

// Invert notched_tone_space_value: monotone and odd on [-pi, pi].
double invert_notch_response(double kappa, int n_symbols) {
    const double mag = std::abs(kappa);
    if (mag < 1e-14) return 0.0;
    double lo = 0.0, hi = kPi;
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (notched_tone_space_value(mid, n_symbols) < mag)
            lo = mid;
        else
            hi = mid;
    }
    const double omega = 0.5 * (lo + hi);
    return std::copysign(omega, kappa);
}

}  // namespace

AngleEstimate estimate_pitch(const EchoTensor& t, const EstimatorConfig& cfg) {
    require_erased(t, "pitch");
    const int L = t.nrz();
    if (L < 2) throw PipelineError("pitch", "requires N_R^z >= 2");
    const int N = t.n_symbols(), M = t.m_subcarriers();
    Eigen::MatrixXcd y(L, static_cast<Eigen::Index>(t.nrx()) * N * M);
    for (int ix = 0; ix < t.nrx(); ++ix)
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) {
                const Eigen::Index col = (static_cast<Eigen::Index>(ix) * N + n) * M + m;
                for (int iz = 0; iz < L; ++iz) y(iz, col) = t.at(ix, iz, n, m);
            }

    AngleEstimate out;
    const SpaceValueSet sv = run_esprit(y, cfg, "pitch", out.flags);
    out.kappa = dominant_value(sv, "pitch", out.flags);
    out.detected = sv.count;

    const double omega_sdd =
        kSpeedOfLight * out.kappa / (2.0 * kPi * cfg.rx_geom.f0 * cfg.rx_geom.spacing_d);
    if (std::abs(omega_sdd) > 1.0 + kSddRangeTol)
        out.flags.push_back("pitch: |Omega| exceeds physical range, clamped");
    out.angle = std::asin(std::clamp(omega_sdd, -1.0, 1.0));
    return out;
}

AngleEstimate estimate_horizontal(const EchoTensor& t, const EstimatorConfig& cfg,
                                  double phi_hat) {
    require_erased(t, "horizontal");
    const int L = t.nrx();
    if (L < 2) throw PipelineError("horizontal", "requires N_R^x >= 2");
    const double cos_phi = std::cos(phi_hat);
    if (std::abs(cos_phi) <= cfg.eps)
        throw PipelineError("horizontal", "horizontal angle unobservable near zenith");

    const int N = t.n_symbols(), M = t.m_subcarriers();
    Eigen::MatrixXcd y(L, static_cast<Eigen::Index>(t.nrz()) * N * M);
    for (int iz = 0; iz < t.nrz(); ++iz)
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) {
                const Eigen::Index col = (static_cast<Eigen::Index>(iz) * N + n) * M + m;
                for (int ix = 0; ix < L; ++ix) y(ix, col) = t.at(ix, iz, n, m);
            }

    AngleEstimate out;
    const SpaceValueSet sv = run_esprit(y, cfg, "horizontal", out.flags);
    out.kappa = dominant_value(sv, "horizontal", out.flags);
    out.detected = sv.count;

    const double psi =
        kSpeedOfLight * out.kappa / (2.0 * kPi * cfg.rx_geom.f0 * cfg.rx_geom.spacing_d);
    const double ratio = psi / cos_phi;
    if (std::abs(ratio) > 1.0 + kSddRangeTol)
        out.flags.push_back("horizontal: |Psi/cos(phi)| exceeds physical range, clamped");
    out.angle = std::acos(std::clamp(ratio, -1.0, 1.0));
    return out;
}

DistanceEstimate estimate_distance(const EchoTensor& t, const EstimatorConfig& cfg) {
    require_erased(t, "distance");
    const int L = t.m_subcarriers();
    if (L < 2) throw PipelineError("distance", "requires M >= 2");
    const int N = t.n_symbols();
    Eigen::MatrixXcd y(L, static_cast<Eigen::Index>(t.nrx()) * t.nrz() * N);
    for (int ix = 0; ix < t.nrx(); ++ix)
        for (int iz = 0; iz < t.nrz(); ++iz)
            for (int n = 0; n < N; ++n) {
                const Eigen::Index col =
                    (static_cast<Eigen::Index>(ix) * t.nrz() + iz) * N + n;
                for (int m = 0; m < L; ++m) y(m, col) = t.at(ix, iz, n, m);
            }

    DistanceEstimate out;
    const SpaceValueSet sv = run_esprit(y, cfg, "distance", out.flags);
    out.kappa = dominant_value(sv, "distance", out.flags);

    // Map into (-2 pi, 0] so the negative scaling lands on [0, c/(2 df)).
    const double mapped = (out.kappa > 0.0) ? out.kappa - 2.0 * kPi : out.kappa;
    out.r = -kSpeedOfLight * mapped / (4.0 * kPi * cfg.grid.delta_f);
    return out;
}

namespace {

std::vector<VirtualVelocitySample> virtual_velocities_impl(const EchoTensor& t,
                                                           const EstimatorConfig& cfg,
                                                           int* failed_count, bool parallel) {
    require_erased(t, "virtual_velocity");
    const int N = t.n_symbols(), M = t.m_subcarriers();
    if (N < 2) throw PipelineError("virtual_velocity", "requires N >= 2");
    const bool compensate = cfg.notch_compensation && t.stage() == TensorStage::dt_eec;
    const double scale =
        kSpeedOfLight / (4.0 * kPi * cfg.grid.f0 * cfg.grid.symbol_interval());

    const int n_ant = t.nrx() * t.nrz();
    std::vector<double> value(static_cast<size_t>(n_ant),
                              std::numeric_limits<double>::quiet_NaN());

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int a = 0; a < n_ant; ++a) {
        const int ix = a / t.nrz();
        const int iz = a % t.nrz();
        Eigen::MatrixXcd y(N, M);
        const std::complex<double>* slice = t.antenna_slice(ix, iz);
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m) y(n, m) = slice[n * M + m];
        try {
            const SpaceValueSet sv = esprit_space_values(y, 1);
            if (sv.count >= 1) {
                double kappa = sv.values.front();
                if (compensate) kappa = invert_notch_response(kappa, N);
                value[static_cast<size_t>(a)] = scale * kappa;
            }
        } catch (const std::exception&) {
            // omitted; reported via failed_count
        }
    }

    std::vector<VirtualVelocitySample> out;
    out.reserve(static_cast<size_t>(n_ant));
    int failed = 0;
    for (int a = 0; a < n_ant; ++a) {
        if (std::isnan(value[static_cast<size_t>(a)])) {
            ++failed;
            continue;
        }
        out.push_back({a / t.nrz(), a % t.nrz(), value[static_cast<size_t>(a)]});
    }
    if (failed_count) *failed_count = failed;
    return out;
}

}  // namespace

std::vector<VirtualVelocitySample> estimate_virtual_velocities(const EchoTensor& t,
                                                               const EstimatorConfig& cfg,
                                                               int* failed_count) {
    return virtual_velocities_impl(t, cfg, failed_count, true);
}

std::vector<VirtualVelocitySample> estimate_virtual_velocities_serial(const EchoTensor& t,
                                                                      const EstimatorConfig& cfg,
                                                                      int* failed_count) {
    return virtual_velocities_impl(t, cfg, failed_count, false);
}

PlaneFit fit_plane(const std::vector<VirtualVelocitySample>& samples) {
    const size_t n = samples.size();
    if (n == 0) throw PipelineError("plane_fit", "no virtual-velocity samples");

    double mx = 0.0, mz = 0.0, mv = 0.0;
    for (const auto& s : samples) {
        mx += s.n_x;
        mz += s.n_z;
        mv += s.v;
    }
    mx /= static_cast<double>(n);
    mz /= static_cast<double>(n);
    mv /= static_cast<double>(n);

    double sxx = 0.0, szz = 0.0, sxz = 0.0, sxv = 0.0, szv = 0.0;
    for (const auto& s : samples) {
        const double dx = s.n_x - mx;
        const double dz = s.n_z - mz;
        const double dv = s.v - mv;
        sxx += dx * dx;
        szz += dz * dz;
        sxz += dx * dz;
        sxv += dx * dv;
        szv += dz * dv;
    }

    const bool x_varies = sxx > 0.0;
    const bool z_varies = szz > 0.0;
    PlaneFit fit;
    if (x_varies && z_varies) {
        if (n < 3) throw PipelineError("plane_fit", "need >= 3 samples for a plane");
        const double det = sxx * szz - sxz * sxz;
        if (det <= 1e-12 * sxx * szz)
            throw PipelineError("plane_fit", "collinear samples: n_x/n_z jointly degenerate");
        fit.coeffs.b = (szz * sxv - sxz * szv) / det;
        fit.coeffs.c = (sxx * szv - sxz * sxv) / det;
    } else if (z_varies) {
        if (n < 2) throw PipelineError("plane_fit", "need >= 2 samples for a line");
        fit.coeffs.b = 0.0;
        fit.coeffs.c = szv / szz;
    } else if (x_varies) {
        if (n < 2) throw PipelineError("plane_fit", "need >= 2 samples for a line");
        fit.coeffs.b = sxv / sxx;
        fit.coeffs.c = 0.0;
    } else {
        throw PipelineError("plane_fit", "degenerate samples: n_x and n_z axes both constant");
    }
    fit.coeffs.a = mv - fit.coeffs.b * mx - fit.coeffs.c * mz;

    double ss = 0.0;
    for (const auto& s : samples) {
        const double r = fit.coeffs.a + fit.coeffs.b * s.n_x + fit.coeffs.c * s.n_z - s.v;
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

RecoveredVelocities recover_velocities(const PlaneCoeffs& coeffs, double theta_hat,
                                       double phi_hat, const ArrayGeometry& tx_geom, double d,
                                       double eps) {
    const double cp = std::cos(phi_hat);
    const double sp = std::sin(phi_hat);
    const double st = std::sin(theta_hat);
    const double ct = std::cos(theta_hat);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    RecoveredVelocities out;
    if (std::abs(cp) <= eps) {
        out.omega_phi = nan;
        out.flags.push_back("recover: omega_phi unobservable (|cos(phi)| <= eps)");
    } else {
        out.omega_phi = -2.0 * coeffs.c / (d * cp);
    }

    if (std::abs(cp) <= eps || std::abs(st) <= eps || std::isnan(out.omega_phi)) {
        out.omega_theta = nan;
        out.flags.push_back("recover: omega_theta unobservable (denominator guard)");
    } else {
        // Sign fixed by the forward/inverse identity with the plane model.
        out.omega_theta = (2.0 * coeffs.b / d - sp * ct * out.omega_phi) / (cp * st);
    }

    out.v_r = coeffs.a;
    if (!std::isnan(out.omega_phi)) {
        out.v_r += (d / 4.0) * ((tx_geom.nz - 1) * cp - (tx_geom.nx - 1) * sp * ct) *
                   out.omega_phi;
    } else {
        out.flags.push_back("recover: v_r missing the omega_phi correction");
    }
    if (!std::isnan(out.omega_theta)) {
        out.v_r -= (d / 4.0) * (tx_geom.nx - 1) * cp * st * out.omega_theta;
    } else {
        out.flags.push_back("recover: v_r missing the omega_theta correction");
    }
    return out;
}

Estimate6D estimate_6d(EchoTensor t, const EstimatorConfig& cfg, const SymbolFrame* symbols) {
    if (t.nrx() != cfg.rx_geom.nx || t.nrz() != cfg.rx_geom.nz ||
        t.n_symbols() != cfg.grid.n_symbols || t.m_subcarriers() != cfg.grid.m_subcarriers)
        throw PipelineError("setup", "tensor dimensions do not match the configuration");

    if (t.stage() == TensorStage::raw) {
        if (!symbols) throw PipelineError("erase", "raw tensor requires the symbol frame");
        t = erase_symbols(std::move(t), *symbols);
    }
    if (cfg.suppression && t.stage() == TensorStage::eec)
        t = suppress_clutter(std::move(t));

    Estimate6D est;
    const AngleEstimate pitch = estimate_pitch(t, cfg);
    est.phi_hat = pitch.angle;
    est.diag.kappa_omega = pitch.kappa;
    est.diag.detected_sources = pitch.detected;
    est.diag.flags = pitch.flags;

    const AngleEstimate horiz = estimate_horizontal(t, cfg, est.phi_hat);
    est.theta_hat = horiz.angle;
    est.diag.kappa_psi = horiz.kappa;
    est.diag.flags.insert(est.diag.flags.end(), horiz.flags.begin(), horiz.flags.end());

    const DistanceEstimate dist = estimate_distance(t, cfg);
    est.r_hat = dist.r;
    est.diag.kappa_r = dist.kappa;
    est.diag.flags.insert(est.diag.flags.end(), dist.flags.begin(), dist.flags.end());

    int failed = 0;
    const auto samples = estimate_virtual_velocities(t, cfg, &failed);
    est.diag.failed_antennas = failed;
    if (failed > 0)
        est.diag.flags.push_back("virtual_velocity: " + std::to_string(failed) +
                                 " antenna(s) omitted");
    const PlaneFit fit = fit_plane(samples);
    est.diag.plane = fit.coeffs;
    est.diag.plane_residual_rms = fit.residual_rms;

    const RecoveredVelocities rec = recover_velocities(
        fit.coeffs, est.theta_hat, est.phi_hat, cfg.tx_geom, cfg.rx_geom.spacing_d, cfg.eps);
    est.v_r_hat = rec.v_r;
    est.omega_theta_hat = rec.omega_theta;
    est.omega_phi_hat = rec.omega_phi;
    est.diag.flags.insert(est.diag.flags.end(), rec.flags.begin(), rec.flags.end());
    return est;
}

double virtual_velocity_ambiguity_bound(const OfdmGrid& grid) {
    return kSpeedOfLight / (4.0 * grid.f0 * grid.symbol_interval());
}

}  // namespace isac6d
