#pragma once

#include <functional>

#include "isac6d/channel.hpp"
#include "isac6d/echo_tensor.hpp"

// Beamformed transmission, echo-tensor synthesis, symbol erasure (EEC) and
// static-clutter suppression (DT-EEC).
//
// The echo on subcarrier m of symbol n is  y = s_{n,m} * (H_{n,m} conj(w)) + noise:
// the conjugation applies to the beamforming weights (a physical phase
// property), the unit-modulus symbol rides outside and is removed exactly by
// erase_symbols. Noise is i.i.d. circular complex Gaussian with per-entry
// variance noise_sigma^2.

namespace isac6d {

// Unit-modulus sensing symbols, one per (symbol, subcarrier).
struct SymbolFrame {
    Eigen::MatrixXcd symbols;  // N x M

    void validate() const;
};

SymbolFrame random_qpsk_frame(int n_symbols, int m_subcarriers, std::uint64_t seed);

// Sensing beam of the transmit UPA: sqrt(rho * power / N_H) * a_H(aim SDD).
Eigen::VectorXcd tx_beam(const ArrayGeometry& tx_geom, double aim_theta, double aim_phi,
                         double power, double rho);

// Everything needed to synthesize one frame of echoes.
struct Scene {
    std::vector<TargetState> targets;  // RCS values already drawn for the frame
    const ClutterFrame* clutter = nullptr;
    ArrayGeometry tx_geom;
    ArrayGeometry rx_geom;
    OfdmGrid grid;
    ChannelMode mode = ChannelMode::six_d;
};

using ChannelProvider = std::function<ChannelMatrix(int n, int m)>;

// Generic synthesis from an arbitrary per-(n, m) channel source.
EchoTensor synthesize_echoes(const ChannelProvider& channel, const ArrayGeometry& rx_geom,
                             const OfdmGrid& grid, const Eigen::VectorXcd& beam,
                             const SymbolFrame& symbols, double noise_sigma,
                             std::uint64_t noise_seed, bool parallel = true);

// Scene synthesis. Factored modes use the rank-1 structure directly; the
// exact mode routes through the generic path. Bit-identical to the serial
// variant for any thread count (per-(n, m) noise streams).
EchoTensor synthesize_scene(const Scene& scene, const Eigen::VectorXcd& beam,
                            const SymbolFrame& symbols, double noise_sigma,
                            std::uint64_t noise_seed, bool parallel = true);

// Serial reference implementation kept for testing and benchmarking.
EchoTensor synthesize_scene_serial(const Scene& scene, const Eigen::VectorXcd& beam,
                                   const SymbolFrame& symbols, double noise_sigma,
                                   std::uint64_t noise_seed);

// raw -> eec: divide each (., ., n, m) slice by s_{n,m}.
EchoTensor erase_symbols(EchoTensor t, const SymbolFrame& symbols);

// eec -> dt_eec: remove the per-(antenna, subcarrier) mean over the N
// symbols (zero-Doppler projection). Requires N >= 2. Static returns are
// constant across the frame and cancel exactly; targets with virtual
// velocity near zero are attenuated.
EchoTensor suppress_clutter(EchoTensor t);

// Mean per-entry power, used by the SNR definition.
double mean_entry_power(const EchoTensor& t);

}  // namespace isac6d
