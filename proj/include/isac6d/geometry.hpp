#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

// Coordinate transforms, spatial-domain directions, and UPA steering vectors.
//
// Conventions used project-wide:
//   * angles are radians internally; degrees appear only at CLI/config boundaries
//   * flat antenna index n = n_x * nz + n_z (x-major), matching the Kronecker
//     order of upa_steering; channel and airlink reshape with the same rule

namespace isac6d {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct CartesianPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// (r, theta, phi): polar distance, horizontal angle in [0, pi],
// pitch angle in [-pi/2, pi/2].
struct SphericalPoint {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;

    bool in_valid_ranges() const {
        return r >= 0.0 && theta >= 0.0 && theta <= kPi &&
               phi >= -kPi / 2.0 && phi <= kPi / 2.0;
    }
};

// Spatial-domain direction pair: psi = cos(phi)cos(theta), omega = sin(phi).
// The quantities that enter antenna phases linearly.
struct SddPair {
    double psi = 0.0;
    double omega = 0.0;
};

// One uniform planar array: nx elements along x, nz along z, element
// spacing d, lowest carrier f0. Half-wavelength bound d <= c/(2 f0).
struct ArrayGeometry {
    int nx = 1;
    int nz = 1;
    double spacing_d = 0.0;  // m
    double f0 = 0.0;         // Hz

    int size() const { return nx * nz; }

    void validate() const {
        if (nx < 1 || nz < 1)
            throw std::invalid_argument("ArrayGeometry: nx, nz must be >= 1");
        if (f0 <= 0.0)
            throw std::invalid_argument("ArrayGeometry: f0 must be positive");
        if (spacing_d <= 0.0 || spacing_d > kSpeedOfLight / (2.0 * f0) * (1.0 + 1e-12))
            throw std::invalid_argument(
                "ArrayGeometry: spacing_d violates 0 < d <= c/(2*f0) (half-wavelength bound)");
    }
};

CartesianPoint spherical_to_cartesian(const SphericalPoint& p);

// Inverse of spherical_to_cartesian. theta is recovered in [0, pi] and
// phi in [-pi/2, pi/2]; r = 0 maps to (0, pi/2, 0) by convention.
SphericalPoint cartesian_to_spherical(const CartesianPoint& p);

SddPair sdd_of(double theta, double phi);

// Per-axis steering vector: element i = exp(j * 2*pi*f0*d*value*i / c).
Eigen::VectorXcd axis_steering(int count, double f0, double d, double value);

// Full UPA steering: kron(axis_x(psi), axis_z(omega)); flat index n_x*nz + n_z.
Eigen::VectorXcd upa_steering(const ArrayGeometry& geom, const SddPair& sdd);

}  // namespace isac6d
