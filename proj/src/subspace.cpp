#include "isac6d/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace isac6d {

Eigen::MatrixXcd covariance(const Eigen::MatrixXcd& y) {
    if (y.rows() < 2 || y.cols() < 1)
        throw std::invalid_argument("covariance: snapshot matrix must be at least 2 x 1");
    return (y * y.adjoint()) / static_cast<double>(y.cols());
}

int mdl_order(const std::vector<double>& eigenvalues_desc, int snapshots, int max_sources) {
    if (eigenvalues_desc.empty())
        throw std::invalid_argument("mdl_order: empty eigenvalue list");
    const int L = static_cast<int>(eigenvalues_desc.size());
    const int k_max = std::clamp(max_sources, 0, L - 1);
    const double s = static_cast<double>(std::max(snapshots, 1));

    // Relative floor: machine-noise eigenvalues of a noise-free ensemble
    // collapse to a common value instead of dominating the geometric mean.
    const double floor_v = std::max(eigenvalues_desc.front(), 1e-300) * 1e-15;
    std::vector<double> lam(eigenvalues_desc.begin(), eigenvalues_desc.end());
    for (auto& v : lam) v = std::max(v, floor_v);

    int best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= k_max; ++k) {
        const int tail = L - k;
        double log_sum = 0.0, sum = 0.0;
        for (int i = k; i < L; ++i) {
            log_sum += std::log(lam[static_cast<size_t>(i)]);
            sum += lam[static_cast<size_t>(i)];
        }
        const double log_gm = log_sum / tail;
        const double log_am = std::log(sum / tail);
        const double data_term = -s * tail * (log_gm - log_am);
        const double penalty = 0.5 * k * (2.0 * L - k) * std::log(s);
        const double mdl = data_term + penalty;
        if (mdl < best) {
            best = mdl;
            best_k = k;
        }
    }
    return best_k;
}

SpaceValueSet esprit_space_values(const Eigen::MatrixXcd& y, std::optional<int> forced_order,
                                  int max_sources) {
    const int L = static_cast<int>(y.rows());
    const int S = static_cast<int>(y.cols());
    if (L < 2) throw std::invalid_argument("esprit_space_values: need L >= 2");

    const Eigen::MatrixXcd r = covariance(y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("esprit_space_values: covariance eigendecomposition failed");

    // Descending order.
    std::vector<int> order(static_cast<size_t>(L));
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXd ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ev[a] > ev[b]; });
    std::vector<double> eigs(static_cast<size_t>(L));
    Eigen::MatrixXcd u(L, L);
    for (int i = 0; i < L; ++i) {
        eigs[static_cast<size_t>(i)] = std::max(ev[order[static_cast<size_t>(i)]], 0.0);
        u.col(i) = es.eigenvectors().col(order[static_cast<size_t>(i)]);
    }

    SpaceValueSet out;
    if (eigs[0] <= 0.0) return out;  // no energy at all

    int k;
    if (forced_order) {
        k = *forced_order;
        if (k < 0) throw std::invalid_argument("esprit_space_values: negative forced order");
    } else {
        const int cap = (max_sources < 0) ? L - 1 : std::min(max_sources, L - 1);
        k = mdl_order(eigs, S, cap);
    }
    if (k == 0) return out;
    if (L < k + 1)
        throw std::invalid_argument("esprit_space_values: L must be >= order + 1");

    // Stacked shifted copies of the signal subspace.
    Eigen::MatrixXcd u1(L - 1, 2 * k);
    u1.leftCols(k) = u.topLeftCorner(L - 1, k);
    u1.rightCols(k) = u.block(1, 0, L - 1, k);
    const Eigen::MatrixXcd rt = u1.adjoint() * u1;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(rt);
    if (es2.info() != Eigen::Success)
        throw std::runtime_error("esprit_space_values: TLS eigendecomposition failed");
    std::vector<int> ord2(static_cast<size_t>(2 * k));
    std::iota(ord2.begin(), ord2.end(), 0);
    const Eigen::VectorXd ev2 = es2.eigenvalues();
    std::sort(ord2.begin(), ord2.end(),
              [&](int a, int b) { return std::abs(ev2[a]) > std::abs(ev2[b]); });

    // Minor half of the doubled subspace.
    Eigen::MatrixXcd minor(2 * k, k);
    for (int i = 0; i < k; ++i) minor.col(i) = es2.eigenvectors().col(ord2[static_cast<size_t>(k + i)]);
    const Eigen::MatrixXcd ua = minor.topRows(k);
    const Eigen::MatrixXcd ub = minor.bottomRows(k);

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(ub);
    if (!lu.isInvertible())
        throw SingularSubspaceError("esprit_space_values: singular TLS partition");
    const Eigen::MatrixXcd rot = -ua * lu.inverse();

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es3(rot);
    if (es3.info() != Eigen::Success)
        throw std::runtime_error("esprit_space_values: rotation eigendecomposition failed");

    out.count = k;
    out.values.resize(static_cast<size_t>(k));
    out.dominance.resize(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        const std::complex<double> lam = es3.eigenvalues()[i];
        const double kappa = std::atan2(lam.imag(), lam.real());
        // Signal power along this space value's steering direction.
        Eigen::VectorXcd a(L);
        for (int l = 0; l < L; ++l) a[l] = std::polar(1.0 / std::sqrt(double(L)), kappa * l);
        out.values[static_cast<size_t>(i)] = kappa;
        out.dominance[static_cast<size_t>(i)] = std::real(a.dot(r * a));
    }
    std::vector<int> ord3(static_cast<size_t>(k));
    std::iota(ord3.begin(), ord3.end(), 0);
    std::sort(ord3.begin(), ord3.end(), [&](int a, int b) {
        return out.dominance[static_cast<size_t>(a)] > out.dominance[static_cast<size_t>(b)];
    });
    SpaceValueSet sorted;
    sorted.count = k;
    for (int i : ord3) {
        sorted.values.push_back(out.values[static_cast<size_t>(i)]);
        sorted.dominance.push_back(out.dominance[static_cast<size_t>(i)]);
    }
    return sorted;
}

}  // namespace isac6d
