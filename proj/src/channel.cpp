#include "isac6d/channel.hpp"

#include <cmath>

namespace isac6d {

double fading_factor(double r, double rcs, double f0) {
    if (!(r > 0.0)) throw std::domain_error("fading_factor: range must be positive");
    const double lambda = kSpeedOfLight / f0;
    const double four_pi = 4.0 * kPi;
    return std::sqrt(lambda * lambda / (four_pi * four_pi * four_pi * r * r * r * r)) * rcs;
}

ChannelMatrix exact_path_channel(const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                                 const TargetState& state, int n, int m, const OfdmGrid& grid) {
    const double t_s = grid.symbol_interval();
    const SphericalPoint pos_n = state_at_symbol(state, n, t_s);
    const CartesianPoint tgt = spherical_to_cartesian(pos_n);
    if (tgt.x == 0.0 && tgt.y == 0.0 && tgt.z == 0.0)
        throw std::domain_error("exact_path_channel: target at array origin");

    // Amplitude held at frame-start range for comparability with the
    // factored form.
    const double alpha = fading_factor(state.position.r, state.rcs, grid.f0);
    const double f_m = grid.subcarrier_freq(m);
    const double phase_scale = -2.0 * kPi * f_m / kSpeedOfLight;

    auto antenna_distances = [&](const ArrayGeometry& g) {
        std::vector<double> dist(static_cast<size_t>(g.size()));
        for (int ix = 0; ix < g.nx; ++ix) {
            for (int iz = 0; iz < g.nz; ++iz) {
                const double dx = tgt.x - ix * g.spacing_d;
                const double dz = tgt.z - iz * g.spacing_d;
                dist[static_cast<size_t>(ix * g.nz + iz)] =
                    std::sqrt(dx * dx + tgt.y * tgt.y + dz * dz);
            }
        }
        return dist;
    };
    const std::vector<double> d_tx = antenna_distances(tx_geom);
    const std::vector<double> d_rx = antenna_distances(rx_geom);

    ChannelMatrix h(rx_geom.size(), tx_geom.size());
    for (int r = 0; r < rx_geom.size(); ++r)
        for (int c = 0; c < tx_geom.size(); ++c)
            h(r, c) = alpha * std::polar(1.0, phase_scale * (d_tx[static_cast<size_t>(c)] +
                                                             d_rx[static_cast<size_t>(r)]));
    return h;
}

ChannelMatrix factored_channel(const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                               const TargetState& state, int n, int m, const OfdmGrid& grid,
                               ChannelMode mode) {
    if (mode == ChannelMode::exact)
        return exact_path_channel(tx_geom, rx_geom, state, n, m, grid);
    if (!(state.position.r > 0.0))
        throw std::domain_error("factored_channel: target at array origin");

    const double t_s = grid.symbol_interval();
    const SddPair sdd = (mode == ChannelMode::six_d)
                            ? exact_sdd_at_symbol(state, n, t_s)
                            : sdd_of(state.position.theta, state.position.phi);

    const double alpha = fading_factor(state.position.r, state.rcs, grid.f0);
    const double f_m = grid.subcarrier_freq(m);
    const double dist_phase = -4.0 * kPi * f_m * state.position.r / kSpeedOfLight;
    const double dopp_phase =
        4.0 * kPi * grid.f0 * state.v_r * static_cast<double>(n) * t_s / kSpeedOfLight;
    const std::complex<double> coef = alpha * std::polar(1.0, dist_phase + dopp_phase);

    const Eigen::VectorXcd a_rx = upa_steering(rx_geom, sdd);
    const Eigen::VectorXcd a_tx = upa_steering(tx_geom, sdd);
    return coef * (a_rx * a_tx.transpose());
}

ClutterFrame::ClutterFrame(const ClutterModel& model, const ArrayGeometry& rx_geom,
                           const ArrayGeometry& tx_geom, const OfdmGrid& grid,
                           std::uint64_t seed) {
    model.validate();
    matrices_.resize(static_cast<size_t>(grid.m_subcarriers));

    if (model.mode == ClutterModel::Mode::gaussian) {
        for (int m = 0; m < grid.m_subcarriers; ++m) {
            auto eng = make_engine(mix_seed(seed, 0x11u, static_cast<std::uint64_t>(m)));
            ChannelMatrix h(rx_geom.size(), tx_geom.size());
            for (int r = 0; r < rx_geom.size(); ++r)
                for (int c = 0; c < tx_geom.size(); ++c)
                    h(r, c) = model.beta_c * complex_normal(eng, 1.0);
            matrices_[static_cast<size_t>(m)] = std::move(h);
        }
        return;
    }

    // Explicit scatterers: one Swerling-I RCS draw per scatterer per frame.
    auto eng = make_engine(mix_seed(seed, 0x12u));
    std::vector<double> sigma(model.scatterers.size());
    for (size_t i = 0; i < model.scatterers.size(); ++i)
        sigma[i] = rayleigh_amplitude(eng, model.scatterers[i].rcs);

    for (int m = 0; m < grid.m_subcarriers; ++m) {
        const double f_m = grid.subcarrier_freq(m);
        ChannelMatrix h = ChannelMatrix::Zero(rx_geom.size(), tx_geom.size());
        for (size_t i = 0; i < model.scatterers.size(); ++i) {
            const auto& sc = model.scatterers[i];
            const double beta = fading_factor(sc.position.r, sigma[i], grid.f0);
            const SddPair sdd = sdd_of(sc.position.theta, sc.position.phi);
            const double phase = -4.0 * kPi * f_m * sc.position.r / kSpeedOfLight;
            const Eigen::VectorXcd a_rx = upa_steering(rx_geom, sdd);
            const Eigen::VectorXcd a_tx = upa_steering(tx_geom, sdd);
            h.noalias() += (beta * std::polar(1.0, phase)) * (a_rx * a_tx.transpose());
        }
        matrices_[static_cast<size_t>(m)] = std::move(h);
    }
}

ChannelMatrix clutter_channel(const ClutterModel& model, const ArrayGeometry& rx_geom,
                              const ArrayGeometry& tx_geom, int m, const OfdmGrid& grid,
                              std::uint64_t seed) {
    return ClutterFrame(model, rx_geom, tx_geom, grid, seed).matrix(m);
}

ChannelMatrix sensing_channel(const std::vector<TargetState>& targets,
                              const ClutterFrame* clutter, int n, int m,
                              const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                              const OfdmGrid& grid, ChannelMode mode) {
    ChannelMatrix h = ChannelMatrix::Zero(rx_geom.size(), tx_geom.size());
    for (const auto& t : targets) h += factored_channel(tx_geom, rx_geom, t, n, m, grid, mode);
    if (clutter && !clutter->empty()) h += clutter->matrix(m);
    return h;
}

}  // namespace isac6d
