#pragma once

#include <string>

#include "isac6d/airlink.hpp"
#include "isac6d/subspace.hpp"

// The 6D recovery pipeline: four tensor reshapes feeding ESPRIT, plane
// fitting over per-antenna virtual velocities, and velocity inversion.
// Dataflow: phi feeds theta, and both angle estimates feed the velocity
// recovery.

namespace isac6d {

struct PipelineError : std::runtime_error {
    std::string step;
    PipelineError(std::string step_, const std::string& what_)
        : std::runtime_error("[" + step_ + "] " + what_), step(std::move(step_)) {}
};

struct NoTargetError : PipelineError {
    explicit NoTargetError(const std::string& step_)
        : PipelineError(step_, "no target detected (model order 0)") {}
};

struct VirtualVelocitySample {
    int n_x = 0;
    int n_z = 0;
    double v = 0.0;  // m/s
};

struct PlaneFit {
    PlaneCoeffs coeffs;
    double residual_rms = 0.0;  // m/s
};

struct Estimate6D {
    double r_hat = 0.0;            // m
    double theta_hat = 0.0;        // rad
    double phi_hat = 0.0;          // rad
    double v_r_hat = 0.0;          // m/s
    double omega_theta_hat = 0.0;  // rad/s
    double omega_phi_hat = 0.0;    // rad/s

    struct Diagnostics {
        double kappa_omega = 0.0;
        double kappa_psi = 0.0;
        double kappa_r = 0.0;
        PlaneCoeffs plane;
        double plane_residual_rms = 0.0;
        int detected_sources = 0;  // pitch-step MDL outcome
        int failed_antennas = 0;
        std::vector<std::string> flags;
    } diag;
};

struct EstimatorConfig {
    ArrayGeometry rx_geom;
    ArrayGeometry tx_geom;
    OfdmGrid grid;
    bool suppression = true;
    double eps = 1e-3;       // trigonometric denominator guard
    int mdl_max_sources = 4;
    // Correct per-antenna space values for the deterministic response of the
    // zero-Doppler notch that suppress_clutter applies along the symbol axis.
    bool notch_compensation = true;
};

struct AngleEstimate {
    double angle = 0.0;  // rad
    double kappa = 0.0;
    int detected = 1;
    std::vector<std::string> flags;
};

struct DistanceEstimate {
    double r = 0.0;  // m
    double kappa = 0.0;
    std::vector<std::string> flags;
};

// Pitch from the (N_R^z x N_R^x N M) reshape: phi = asin(c kappa / (2 pi f0 d)).
AngleEstimate estimate_pitch(const EchoTensor& t, const EstimatorConfig& cfg);

// Horizontal from the (N_R^x x N_R^z N M) reshape, consuming phi_hat:
// theta = acos(clamp(Psi / cos(phi_hat))).
AngleEstimate estimate_horizontal(const EchoTensor& t, const EstimatorConfig& cfg,
                                  double phi_hat);

// Distance from the (M x N_R^x N_R^z N) reshape. The space value is mapped
// into (-2 pi, 0] before scaling, making r single-valued on [0, c/(2 df)).
DistanceEstimate estimate_distance(const EchoTensor& t, const EstimatorConfig& cfg);

// Per-antenna virtual velocities from the (N x M) slices, forced order 1.
// Antennas whose ESPRIT fails are omitted; failed_count reports how many.
std::vector<VirtualVelocitySample> estimate_virtual_velocities(const EchoTensor& t,
                                                               const EstimatorConfig& cfg,
                                                               int* failed_count = nullptr);
std::vector<VirtualVelocitySample> estimate_virtual_velocities_serial(
    const EchoTensor& t, const EstimatorConfig& cfg, int* failed_count = nullptr);

// Least-squares fit of v = a + b n_x + c n_z on index-centered coordinates.
// With a single distinct n_x (1D array) b is fixed to 0, likewise for n_z.
PlaneFit fit_plane(const std::vector<VirtualVelocitySample>& samples);

// Invert the plane coefficients into (v_r, omega_theta, omega_phi) given the
// angle estimates. Unobservable components (guard denominators below eps)
// come back as NaN with a flag.
struct RecoveredVelocities {
    double v_r = 0.0;
    double omega_theta = 0.0;
    double omega_phi = 0.0;
    std::vector<std::string> flags;
};
RecoveredVelocities recover_velocities(const PlaneCoeffs& coeffs, double theta_hat,
                                       double phi_hat, const ArrayGeometry& tx_geom, double d,
                                       double eps = 1e-3);

// Full pipeline on a raw or eec tensor: symbol erasure (raw only, needs the
// frame) -> clutter suppression (if enabled) -> pitch -> horizontal ->
// distance -> virtual velocities -> plane fit -> velocity recovery.
Estimate6D estimate_6d(EchoTensor t, const EstimatorConfig& cfg,
                       const SymbolFrame* symbols = nullptr);

// Space value of the zero-Doppler-notched unit tone as a function of the true
// tone frequency: the deterministic response inverted by notch compensation.
double notched_tone_space_value(double omega, int n_symbols);

// Upper bound |v| < c / (4 f0 T_s) before the Doppler phase wraps.
double virtual_velocity_ambiguity_bound(const OfdmGrid& grid);

}  // namespace isac6d
