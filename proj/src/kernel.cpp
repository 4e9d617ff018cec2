#include "mgp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace mgp {

BasisSet::BasisSet(Eigen::MatrixXd c, Eigen::VectorXd h) : centers(std::move(c)), scales(std::move(h)) {
    if (centers.rows() != scales.size()) throw std::invalid_argument("basis: centers and scales differ in length");
    if (centers.rows() < 1) throw std::invalid_argument("basis: needs at least one function");
    if (!(scales.array() > 0.0).all()) throw std::invalid_argument("basis: scales must be > 0");
}

BasisSet make_basis(const Eigen::MatrixXd& points, const ClusterResult& clusters, const ScaleConfig& cfg) {
    const auto D = clusters.total();
    Eigen::MatrixXd c(D, points.cols());
    Eigen::VectorXd h(D);
    std::vector<int> levels(static_cast<std::size_t>(D));
    for (Eigen::Index j = 0; j < D; ++j) {
        const auto& center = clusters.centers[static_cast<std::size_t>(j)];
        c.row(j) = points.row(center.row);
        h(j) = cfg.scale(center.scale);
        levels[static_cast<std::size_t>(j)] = center.scale;
    }
    BasisSet basis(std::move(c), std::move(h));
    basis.levels = std::move(levels);
    return basis;
}

double basis_eval(const Eigen::Ref<const Eigen::VectorXd>& q, const Eigen::Ref<const Eigen::VectorXd>& center,
                  double h) {
    if (!(h > 0.0)) throw std::invalid_argument("basis_eval: h must be > 0");
    if (q.size() != center.size()) throw std::invalid_argument("basis_eval: dimension mismatch");
    return std::exp(-(q - center).squaredNorm() / (h * h));
}

Eigen::VectorXd features(const BasisSet& basis, const Eigen::Ref<const Eigen::VectorXd>& q) {
    if (q.size() != basis.dim()) throw std::invalid_argument("features: dimension mismatch");
    const auto D = basis.size();
    Eigen::VectorXd phi(D);
    for (Eigen::Index j = 0; j < D; ++j) {
        double r2 = 0.0;
        for (Eigen::Index k = 0; k < q.size(); ++k) {
            const double t = q(k) - basis.centers(j, k);
            r2 += t * t;
        }
        phi(j) = std::exp(-r2 / (basis.scales(j) * basis.scales(j)));
    }
    return phi;
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& inputs, const BasisSet& basis) {
    if (inputs.cols() != basis.dim()) throw std::invalid_argument("design_matrix: dimension mismatch");
    const auto D = basis.size();
    const auto N = inputs.rows();
    const auto d = inputs.cols();
    const Eigen::VectorXd inv_h2 = basis.scales.array().square().inverse().matrix();
    Eigen::MatrixXd phi(D, N);
    for (Eigen::Index n = 0; n < N; ++n) {
        for (Eigen::Index j = 0; j < D; ++j) {
            double r2 = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                const double t = inputs(n, k) - basis.centers(j, k);
                r2 += t * t;
            }
            phi(j, n) = std::exp(-r2 * inv_h2(j));
        }
    }
    return phi;
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& phi) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(phi.rows(), phi.rows());
    g.selfadjointView<Eigen::Upper>().rankUpdate(phi);
    g.triangularView<Eigen::StrictlyLower>() = g.transpose();
    return g;
}

Eigen::MatrixXd kernel_from_design(const Eigen::MatrixXd& phi, double sigma_p) {
    if (!(sigma_p > 0.0)) throw std::invalid_argument("kernel_matrix: sigma_p must be > 0");
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(phi.cols(), phi.cols());
    k.selfadjointView<Eigen::Upper>().rankUpdate(phi.transpose(), sigma_p * sigma_p);
    k.triangularView<Eigen::StrictlyLower>() = k.transpose();
    return k;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs, const BasisSet& basis, double sigma_p) {
    return kernel_from_design(design_matrix(inputs, basis), sigma_p);
}

Eigen::VectorXd kstar(const Eigen::Ref<const Eigen::VectorXd>& q_test, const Eigen::MatrixXd& inputs,
                      const BasisSet& basis, double sigma_p) {
    if (!(sigma_p > 0.0)) throw std::invalid_argument("kstar: sigma_p must be > 0");
    const Eigen::VectorXd phi_star = features(basis, q_test);
    return sigma_p * sigma_p * (design_matrix(inputs, basis).transpose() * phi_star);
}

}  // namespace mgp
