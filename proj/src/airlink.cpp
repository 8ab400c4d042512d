#include "isac6d/airlink.hpp"

#include <cmath>

namespace isac6d {

namespace {

void add_noise_slice(EchoTensor& t, int n, int m, double noise_sigma,
                     std::uint64_t noise_seed) {
    if (noise_sigma <= 0.0) return;
    auto eng = make_engine(mix_seed(noise_seed, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(m)));
    const double var = noise_sigma * noise_sigma;
    for (int ix = 0; ix < t.nrx(); ++ix)
        for (int iz = 0; iz < t.nrz(); ++iz)
            t.at(ix, iz, n, m) += complex_normal(eng, var);
}

void synthesize_generic_cell(EchoTensor& t, const ChannelProvider& channel,
                             const Eigen::VectorXcd& beam_conj, const SymbolFrame& symbols,
                             int n, int m, double noise_sigma, std::uint64_t noise_seed) {
    const ChannelMatrix h = channel(n, m);
    if (h.rows() != static_cast<Eigen::Index>(t.nrx()) * t.nrz() ||
        h.cols() != beam_conj.size())
        throw std::invalid_argument("synthesize_echoes: channel/beam dimension mismatch");
    const Eigen::VectorXcd y = symbols.symbols(n, m) * (h * beam_conj);
    for (int ix = 0; ix < t.nrx(); ++ix)
        for (int iz = 0; iz < t.nrz(); ++iz)
            t.at(ix, iz, n, m) = y[ix * t.nrz() + iz];
    add_noise_slice(t, n, m, noise_sigma, noise_seed);
}

// Per-target quantities that do not depend on the subcarrier.
struct TargetSymbolTerms {
    Eigen::VectorXcd a_rx;           // receive steering at this symbol's SDD
    std::complex<double> gain;       // alpha * doppler * (a_tx^T conj(w))
    double range = 0.0;              // frame-start range for the f_m phase
};

EchoTensor synthesize_scene_impl(const Scene& scene, const Eigen::VectorXcd& beam,
                                 const SymbolFrame& symbols, double noise_sigma,
                                 std::uint64_t noise_seed, bool parallel) {
    const auto& grid = scene.grid;
    const int N = grid.n_symbols;
    const int M = grid.m_subcarriers;
    if (symbols.symbols.rows() != N || symbols.symbols.cols() != M)
        throw std::invalid_argument("synthesize_scene: symbol frame dimension mismatch");
    if (beam.size() != scene.tx_geom.size())
        throw std::invalid_argument("synthesize_scene: beam/tx dimension mismatch");

    EchoTensor t(scene.rx_geom.nx, scene.rx_geom.nz, N, M, TensorStage::raw);
    const Eigen::VectorXcd beam_conj = beam.conjugate();

    if (scene.mode == ChannelMode::exact) {
        ChannelProvider provider = [&scene](int n, int m) {
            ChannelMatrix h = ChannelMatrix::Zero(scene.rx_geom.size(), scene.tx_geom.size());
            for (const auto& tgt : scene.targets)
                h += exact_path_channel(scene.tx_geom, scene.rx_geom, tgt, n, m, scene.grid);
            if (scene.clutter && !scene.clutter->empty()) h += scene.clutter->matrix(m);
            return h;
        };
#pragma omp parallel for collapse(2) schedule(dynamic) if (parallel)
        for (int n = 0; n < N; ++n)
            for (int m = 0; m < M; ++m)
                synthesize_generic_cell(t, provider, beam_conj, symbols, n, m, noise_sigma,
                                        noise_seed);
        return t;
    }

    // Clutter response to the beam depends only on m.
    std::vector<Eigen::VectorXcd> clutter_rx;
    if (scene.clutter && !scene.clutter->empty()) {
        clutter_rx.resize(static_cast<size_t>(M));
        for (int m = 0; m < M; ++m)
            clutter_rx[static_cast<size_t>(m)] = scene.clutter->matrix(m) * beam_conj;
    }

    const double t_s = grid.symbol_interval();
    const int nrz = scene.rx_geom.nz;

#pragma omp parallel for schedule(static) if (parallel)
    for (int n = 0; n < N; ++n) {
        std::vector<TargetSymbolTerms> terms;
        terms.reserve(scene.targets.size());
        for (const auto& tgt : scene.targets) {
            const SddPair sdd = (scene.mode == ChannelMode::six_d)
                                    ? exact_sdd_at_symbol(tgt, n, t_s)
                                    : sdd_of(tgt.position.theta, tgt.position.phi);
            TargetSymbolTerms tt;
            tt.a_rx = upa_steering(scene.rx_geom, sdd);
            const std::complex<double> g =
                upa_steering(scene.tx_geom, sdd).transpose() * beam_conj;
            const double alpha = fading_factor(tgt.position.r, tgt.rcs, grid.f0);
            const double dopp =
                4.0 * kPi * grid.f0 * tgt.v_r * static_cast<double>(n) * t_s / kSpeedOfLight;
            tt.gain = alpha * std::polar(1.0, dopp) * g;
            tt.range = tgt.position.r;
            terms.push_back(std::move(tt));
        }

        Eigen::VectorXcd y(scene.rx_geom.size());
        for (int m = 0; m < M; ++m) {
            const double f_m = grid.subcarrier_freq(m);
            y.setZero();
            for (const auto& tt : terms) {
                const std::complex<double> coef =
                    tt.gain * std::polar(1.0, -4.0 * kPi * f_m * tt.range / kSpeedOfLight);
                y.noalias() += coef * tt.a_rx;
            }
            if (!clutter_rx.empty()) y += clutter_rx[static_cast<size_t>(m)];
            const std::complex<double> s = symbols.symbols(n, m);
            for (int ix = 0; ix < scene.rx_geom.nx; ++ix)
                for (int iz = 0; iz < nrz; ++iz)
                    t.at(ix, iz, n, m) = s * y[ix * nrz + iz];
            add_noise_slice(t, n, m, noise_sigma, noise_seed);
        }
    }
    return t;
}

}  // namespace

void SymbolFrame::validate() const {
    for (Eigen::Index i = 0; i < symbols.rows(); ++i)
        for (Eigen::Index j = 0; j < symbols.cols(); ++j)
            if (std::abs(std::abs(symbols(i, j)) - 1.0) > 1e-12)
                throw std::invalid_argument("SymbolFrame: symbols must be unit modulus");
}

SymbolFrame random_qpsk_frame(int n_symbols, int m_subcarriers, std::uint64_t seed) {
    SymbolFrame f;
    f.symbols.resize(n_symbols, m_subcarriers);
    auto eng = make_engine(mix_seed(seed, 0x21u));
    std::uniform_int_distribution<int> bits(0, 3);
    const double h = 1.0 / std::sqrt(2.0);
    for (int n = 0; n < n_symbols; ++n) {
        for (int m = 0; m < m_subcarriers; ++m) {
            const int b = bits(eng);
            f.symbols(n, m) = {(b & 1) ? -h : h, (b & 2) ? -h : h};
        }
    }
    return f;
}

Eigen::VectorXcd tx_beam(const ArrayGeometry& tx_geom, double aim_theta, double aim_phi,
                         double power, double rho) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("tx_beam: rho must be in (0, 1]");
    if (!(power > 0.0)) throw std::invalid_argument("tx_beam: power must be positive");
    const double scale = std::sqrt(rho * power / static_cast<double>(tx_geom.size()));
    return scale * upa_steering(tx_geom, sdd_of(aim_theta, aim_phi));
}

EchoTensor synthesize_echoes(const ChannelProvider& channel, const ArrayGeometry& rx_geom,
                             const OfdmGrid& grid, const Eigen::VectorXcd& beam,
                             const SymbolFrame& symbols, double noise_sigma,
                             std::uint64_t noise_seed, bool parallel) {
    const int N = grid.n_symbols;
    const int M = grid.m_subcarriers;
    if (symbols.symbols.rows() != N || symbols.symbols.cols() != M)
        throw std::invalid_argument("synthesize_echoes: symbol frame dimension mismatch");
    EchoTensor t(rx_geom.nx, rx_geom.nz, N, M, TensorStage::raw);
    const Eigen::VectorXcd beam_conj = beam.conjugate();
#pragma omp parallel for collapse(2) schedule(dynamic) if (parallel)
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            synthesize_generic_cell(t, channel, beam_conj, symbols, n, m, noise_sigma,
                                    noise_seed);
    return t;
}

EchoTensor synthesize_scene(const Scene& scene, const Eigen::VectorXcd& beam,
                            const SymbolFrame& symbols, double noise_sigma,
                            std::uint64_t noise_seed, bool parallel) {
    return synthesize_scene_impl(scene, beam, symbols, noise_sigma, noise_seed, parallel);
}

EchoTensor synthesize_scene_serial(const Scene& scene, const Eigen::VectorXcd& beam,
                                   const SymbolFrame& symbols, double noise_sigma,
                                   std::uint64_t noise_seed) {
    return synthesize_scene_impl(scene, beam, symbols, noise_sigma, noise_seed, false);
}

EchoTensor erase_symbols(EchoTensor t, const SymbolFrame& symbols) {
    if (t.stage() != TensorStage::raw)
        throw std::logic_error("erase_symbols: tensor stage must be raw");
    if (symbols.symbols.rows() != t.n_symbols() || symbols.symbols.cols() != t.m_subcarriers())
        throw std::invalid_argument("erase_symbols: symbol frame dimension mismatch");
    for (int n = 0; n < t.n_symbols(); ++n) {
        for (int m = 0; m < t.m_subcarriers(); ++m) {
            const std::complex<double> s = symbols.symbols(n, m);
            if (std::abs(s) == 0.0) throw std::domain_error("erase_symbols: zero symbol");
            const std::complex<double> inv = 1.0 / s;
            for (int ix = 0; ix < t.nrx(); ++ix)
                for (int iz = 0; iz < t.nrz(); ++iz)
                    t.at(ix, iz, n, m) *= inv;
        }
    }
    t.set_stage(TensorStage::eec);
    return t;
}

EchoTensor suppress_clutter(EchoTensor t) {
    if (t.stage() != TensorStage::eec)
        throw std::logic_error("suppress_clutter: tensor stage must be eec");
    if (t.n_symbols() < 2)
        throw std::invalid_argument("suppress_clutter: requires N >= 2 symbols");
    const int N = t.n_symbols();
    const int M = t.m_subcarriers();
#pragma omp parallel for collapse(2) schedule(static)
    for (int ix = 0; ix < t.nrx(); ++ix) {
        for (int iz = 0; iz < t.nrz(); ++iz) {
            std::complex<double>* slice = t.antenna_slice(ix, iz);
            for (int m = 0; m < M; ++m) {
                std::complex<double> mean = 0.0;
                for (int n = 0; n < N; ++n) mean += slice[n * M + m];
                mean /= static_cast<double>(N);
                for (int n = 0; n < N; ++n) slice[n * M + m] -= mean;
            }
        }
    }
    t.set_stage(TensorStage::dt_eec);
    return t;
}

double mean_entry_power(const EchoTensor& t) {
    if (t.size() == 0) return 0.0;
    return t.energy() / static_cast<double>(t.size());
}

}  // namespace isac6d
