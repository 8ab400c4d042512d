#pragma once

#include "isac6d/geometry.hpp"

// Target motion over one OFDM frame and the per-antenna virtual-velocity
// plane model. Angular velocities are rad/s internally; positive velocity
// signs mean the corresponding coordinate decreases with time.

namespace isac6d {

// 6D motion parameters of one dynamic target at symbol 0, plus its
// mean radar cross section (Swerling-I mean-square amplitude).
struct TargetState {
    SphericalPoint position;   // r (m), theta (rad), phi (rad)
    double v_r = 0.0;          // m/s, positive = decreasing distance
    double omega_theta = 0.0;  // rad/s, positive = decreasing theta
    double omega_phi = 0.0;    // rad/s, positive = decreasing phi
    double rcs = 1.0;          // m^2

    void validate() const {
        if (!position.in_valid_ranges())
            throw std::invalid_argument("TargetState: position out of valid ranges");
        if (!(rcs > 0.0))
            throw std::invalid_argument("TargetState: rcs must be positive");
    }
};

// OFDM numerology. Symbol interval includes the guard: T_s = 1/delta_f + t_guard.
struct OfdmGrid {
    int m_subcarriers = 1;  // M
    double delta_f = 0.0;   // Hz
    double f0 = 0.0;        // Hz, lowest carrier
    int n_symbols = 1;      // N
    double t_guard = 0.0;   // s

    double symbol_interval() const { return 1.0 / delta_f + t_guard; }
    double subcarrier_freq(int m) const { return f0 + m * delta_f; }
    // Distance steering phase wraps beyond this (one-way).
    double unambiguous_range() const { return kSpeedOfLight / (2.0 * delta_f); }

    void validate() const {
        if (m_subcarriers < 1 || n_symbols < 1)
            throw std::invalid_argument("OfdmGrid: M, N must be >= 1");
        if (!(delta_f > 0.0)) throw std::invalid_argument("OfdmGrid: delta_f must be positive");
        if (!(f0 > 0.0)) throw std::invalid_argument("OfdmGrid: f0 must be positive");
        if (t_guard < 0.0) throw std::invalid_argument("OfdmGrid: t_guard must be >= 0");
    }
};

// Virtual-velocity plane v(n_x, n_z) = a + b*n_x + c*n_z.
struct PlaneCoeffs {
    double a = 0.0;  // m/s
    double b = 0.0;  // m/s per x antenna index
    double c = 0.0;  // m/s per z antenna index
};

// Position at symbol n under constant-velocity motion within the frame.
// Throws if the propagated distance becomes non-positive.
SphericalPoint state_at_symbol(const TargetState& state, int n, double t_s);

// SDD at symbol n, exact trigonometric form.
SddPair exact_sdd_at_symbol(const TargetState& state, int n, double t_s);

// SDD at symbol n, first-order Taylor expansion around symbol 0.
SddPair first_order_sdd_at_symbol(const TargetState& state, int n, double t_s);

// Apparent Doppler velocity seen by receive antenna (n_x, n_z): the radial
// velocity mixed with both angular velocities linearly in antenna index.
double virtual_velocity(const TargetState& state, const ArrayGeometry& tx_geom,
                        int n_x, int n_z, double spacing_d);

// Closed-form plane coefficients such that
// virtual_velocity(...) == a + b*n_x + c*n_z for all antenna indices.
PlaneCoeffs plane_coeffs_forward(const TargetState& state, const ArrayGeometry& tx_geom,
                                 double spacing_d);

}  // namespace isac6d
