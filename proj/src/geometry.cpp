#include "isac6d/geometry.hpp"

#include <cmath>

namespace isac6d {

CartesianPoint spherical_to_cartesian(const SphericalPoint& p) {
    const double cp = std::cos(p.phi);
    return {p.r * cp * std::cos(p.theta), p.r * cp * std::sin(p.theta),
            p.r * std::sin(p.phi)};
}

SphericalPoint cartesian_to_spherical(const CartesianPoint& p) {
    SphericalPoint s;
    s.r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    if (s.r == 0.0) {
        s.theta = kPi / 2.0;
        s.phi = 0.0;
        return s;
    }
    double ratio = p.z / s.r;
    ratio = std::clamp(ratio, -1.0, 1.0);
    s.phi = std::asin(ratio);
    // atan2 yields (-pi, pi]; theta lives in [0, pi] because y >= 0 in the
    // service half-space. Negative y folds onto the boundary.
    s.theta = std::atan2(p.y, p.x);
    if (s.theta < 0.0) s.theta = (s.theta < -kPi / 2.0) ? kPi : 0.0;
    return s;
}

SddPair sdd_of(double theta, double phi) {
    return {std::cos(phi) * std::cos(theta), std::sin(phi)};
}

Eigen::VectorXcd axis_steering(int count, double f0, double d, double value) {
    if (count < 1) throw std::invalid_argument("axis_steering: count must be >= 1");
    Eigen::VectorXcd v(count);
    const double step = 2.0 * kPi * f0 * d * value / kSpeedOfLight;
    for (int i = 0; i < count; ++i)
        v[i] = std::polar(1.0, step * static_cast<double>(i));
    return v;
}

Eigen::VectorXcd upa_steering(const ArrayGeometry& geom, const SddPair& sdd) {
    const Eigen::VectorXcd ax = axis_steering(geom.nx, geom.f0, geom.spacing_d, sdd.psi);
    const Eigen::VectorXcd az = axis_steering(geom.nz, geom.f0, geom.spacing_d, sdd.omega);
    Eigen::VectorXcd out(geom.size());
    for (int ix = 0; ix < geom.nx; ++ix)
        for (int iz = 0; iz < geom.nz; ++iz)
            out[ix * geom.nz + iz] = ax[ix] * az[iz];
    return out;
}

}  // namespace isac6d
