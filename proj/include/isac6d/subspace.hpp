#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

// Generic ESPRIT engine: sample covariance, MDL model-order selection,
// TLS rotational-invariance solve, space-value extraction.
//
// All eigendecompositions order eigenvalues descending by magnitude; the
// minor half of the doubled subspace drives the TLS step. Space values use
// the full-range two-argument arctangent, so kappa lives in (-pi, pi].

namespace isac6d {

// Raised when the TLS partition is not invertible; callers typically retry
// with forced_order = 1.
struct SingularSubspaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Detected space values, sorted most dominant first. dominance[i] is the
// signal power of the snapshot ensemble along the steering of values[i].
struct SpaceValueSet {
    int count = 0;
    std::vector<double> values;
    std::vector<double> dominance;
};

// Sample covariance R = Y Y^H / S for an (L x S) snapshot matrix.
Eigen::MatrixXcd covariance(const Eigen::MatrixXcd& y);

// Wax-Kailath MDL over descending eigenvalues:
//   MDL(k) = -S (L-k) log(GM_k / AM_k) + k (2L - k) log(S) / 2
// with GM/AM the geometric/arithmetic means of the smallest L-k eigenvalues.
// Near-zero eigenvalues are floored relative to the largest one so that
// numerically rank-deficient (noise-free) ensembles behave.
int mdl_order(const std::vector<double>& eigenvalues_desc, int snapshots, int max_sources);

// TLS-ESPRIT along the row axis of y (L x S). The model order comes from MDL
// unless forced_order is given. max_sources caps the MDL search.
SpaceValueSet esprit_space_values(const Eigen::MatrixXcd& y,
                                  std::optional<int> forced_order = std::nullopt,
                                  int max_sources = -1);

}  // namespace isac6d
