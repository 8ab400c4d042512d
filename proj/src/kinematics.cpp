#include "isac6d/kinematics.hpp"

#include <cmath>

namespace isac6d {

SphericalPoint state_at_symbol(const TargetState& state, int n, double t_s) {
    const double dt = static_cast<double>(n) * t_s;
    SphericalPoint p;
    p.r = state.position.r - state.v_r * dt;
    p.theta = state.position.theta - state.omega_theta * dt;
    p.phi = state.position.phi - state.omega_phi * dt;
    if (!(p.r > 0.0))
        throw std::domain_error("state_at_symbol: target range non-positive within frame");
    return p;
}

SddPair exact_sdd_at_symbol(const TargetState& state, int n, double t_s) {
    const double dt = static_cast<double>(n) * t_s;
    const double theta_n = state.position.theta - state.omega_theta * dt;
    const double phi_n = state.position.phi - state.omega_phi * dt;
    return sdd_of(theta_n, phi_n);
}

SddPair first_order_sdd_at_symbol(const TargetState& state, int n, double t_s) {
    const double dt = static_cast<double>(n) * t_s;
    const double st = std::sin(state.position.theta);
    const double ct = std::cos(state.position.theta);
    const double sp = std::sin(state.position.phi);
    const double cp = std::cos(state.position.phi);
    SddPair out;
    out.psi = cp * ct + sp * ct * state.omega_phi * dt + cp * st * state.omega_theta * dt;
    out.omega = sp - cp * state.omega_phi * dt;
    return out;
}

double virtual_velocity(const TargetState& state, const ArrayGeometry& tx_geom,
                        int n_x, int n_z, double spacing_d) {
    const double st = std::sin(state.position.theta);
    const double ct = std::cos(state.position.theta);
    const double sp = std::sin(state.position.phi);
    const double cp = std::cos(state.position.phi);
    const double d = spacing_d;

    return state.v_r -
           (d / 4.0) * ((tx_geom.nz - 1) * cp - (tx_geom.nx - 1) * sp * ct) * state.omega_phi -
           (d / 2.0) * (n_z * cp - n_x * sp * ct) * state.omega_phi +
           (d / 4.0) * (tx_geom.nx - 1) * cp * st * state.omega_theta +
           (d / 2.0) * n_x * cp * st * state.omega_theta;
}

PlaneCoeffs plane_coeffs_forward(const TargetState& state, const ArrayGeometry& tx_geom,
                                 double spacing_d) {
    const double st = std::sin(state.position.theta);
    const double ct = std::cos(state.position.theta);
    const double sp = std::sin(state.position.phi);
    const double cp = std::cos(state.position.phi);
    const double d = spacing_d;

    PlaneCoeffs pc;
    pc.a = state.v_r -
           (d / 4.0) * ((tx_geom.nz - 1) * cp - (tx_geom.nx - 1) * sp * ct) * state.omega_phi +
           (d / 4.0) * (tx_geom.nx - 1) * cp * st * state.omega_theta;
    pc.b = (d / 2.0) * (sp * ct * state.omega_phi + cp * st * state.omega_theta);
    pc.c = -(d / 2.0) * cp * state.omega_phi;
    return pc;
}

}  // namespace isac6d
