#pragma once

#include <optional>
#include <vector>

#include "isac6d/kinematics.hpp"
#include "isac6d/rng.hpp"

// Frequency-domain sensing echo channels: the exact delay-based form, the
// factored rank-1 form (with and without angular motion), and static clutter.
//
// Phase conventions (narrowband): the distance phase uses the subcarrier
// frequency f_m while Doppler and steering phases use f0. The fading
// amplitude is evaluated at the frame-start range and held constant over
// the frame.

namespace isac6d {

// (N_R x N_H) complex channel matrix for one (symbol, subcarrier) pair.
// Row index is the flat RU antenna index, column the flat HU index.
using ChannelMatrix = Eigen::MatrixXcd;

enum class ChannelMode { six_d, four_d, exact };

// Amplitude of one two-way path: sqrt(lambda^2 / ((4 pi)^3 r^4)) * sigma,
// with sigma the RCS value drawn for the frame.
double fading_factor(double r, double rcs, double f0);

// Unapproximated channel: per-entry Euclidean distances from each antenna
// position (n_x d, 0, n_z d) to the target position at symbol n.
ChannelMatrix exact_path_channel(const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                                 const TargetState& state, int n, int m, const OfdmGrid& grid);

// Rank-1 factored channel. six_d uses the exact SDD at symbol n; four_d
// freezes the SDD at symbol 0 (angular motion ignored).
ChannelMatrix factored_channel(const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                               const TargetState& state, int n, int m, const OfdmGrid& grid,
                               ChannelMode mode);

struct ClutterScatterer {
    SphericalPoint position;
    double rcs = 1.0;  // m^2, Swerling-I mean square
};

struct ClutterModel {
    enum class Mode { explicit_scatterers, gaussian };
    Mode mode = Mode::gaussian;
    std::vector<ClutterScatterer> scatterers;  // explicit mode
    double beta_c = 0.0;                       // gaussian mode power regulation

    void validate() const {
        if (mode == Mode::explicit_scatterers && scatterers.empty())
            throw std::invalid_argument("ClutterModel: explicit mode requires >= 1 scatterer");
        if (mode == Mode::gaussian && beta_c < 0.0)
            throw std::invalid_argument("ClutterModel: beta_c must be >= 0");
    }
};

// One frame's static-clutter realization: all randomness (per-scatterer RCS
// draws or the Gaussian matrices) is drawn once at construction; the
// per-subcarrier matrices are constant across the N symbols.
class ClutterFrame {
public:
    ClutterFrame() = default;
    ClutterFrame(const ClutterModel& model, const ArrayGeometry& rx_geom,
                 const ArrayGeometry& tx_geom, const OfdmGrid& grid, std::uint64_t seed);

    bool empty() const { return matrices_.empty(); }
    const ChannelMatrix& matrix(int m) const { return matrices_.at(m); }

private:
    std::vector<ChannelMatrix> matrices_;
};

// Single-matrix form of the clutter channel; symbol-independent by
// construction. Draws the full frame realization so the result for a given
// (model, seed, m) does not depend on which m is requested first.
ChannelMatrix clutter_channel(const ClutterModel& model, const ArrayGeometry& rx_geom,
                              const ArrayGeometry& tx_geom, int m, const OfdmGrid& grid,
                              std::uint64_t seed);

// Sum of per-target factored channels plus clutter (when present).
ChannelMatrix sensing_channel(const std::vector<TargetState>& targets,
                              const ClutterFrame* clutter, int n, int m,
                              const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                              const OfdmGrid& grid, ChannelMode mode = ChannelMode::six_d);

}  // namespace isac6d
