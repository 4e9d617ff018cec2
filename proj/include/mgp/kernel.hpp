#ifndef MGP_KERNEL_HPP
#define MGP_KERNEL_HPP

#include "mgp/clustering.hpp"

#include <Eigen/Core>

#include <vector>

namespace mgp {

/// D Gaussian basis functions, each with its own center and width.
struct BasisSet {
    Eigen::MatrixXd centers;  // D x d, one center per row
    Eigen::VectorXd scales;   // D widths, all > 0
    std::vector<int> levels;  // 1-based scale level per center; empty if not built from a ladder

    BasisSet() = default;
    BasisSet(Eigen::MatrixXd c, Eigen::VectorXd h);

    Eigen::Index size() const noexcept { return centers.rows(); }
    Eigen::Index dim() const noexcept { return centers.cols(); }
};

/// Basis built from clustered training rows; center j takes the width of its scale level.
BasisSet make_basis(const Eigen::MatrixXd& points, const ClusterResult& clusters, const ScaleConfig& cfg);

/// exp(-||q - center||^2 / h^2). Throws std::invalid_argument for h <= 0.
double basis_eval(const Eigen::Ref<const Eigen::VectorXd>& q, const Eigen::Ref<const Eigen::VectorXd>& center,
                  double h);

/// Basis activations phi(q), length D.
Eigen::VectorXd features(const BasisSet& basis, const Eigen::Ref<const Eigen::VectorXd>& q);

/// D x N matrix Phi with Phi(j, n) = phi_j(q_n); `inputs` is N x d.
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& inputs, const BasisSet& basis);

/// Phi * Phi^T, upper triangle computed and mirrored so the result is exactly symmetric.
Eigen::MatrixXd gram(const Eigen::MatrixXd& phi);

/// K = sigma_p^2 * Phi^T * Phi, exactly symmetric.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& inputs, const BasisSet& basis, double sigma_p);
Eigen::MatrixXd kernel_from_design(const Eigen::MatrixXd& phi, double sigma_p);

/// k_*: entries sigma_p^2 * sum_j phi_j(q_n) phi_j(q_test).
Eigen::VectorXd kstar(const Eigen::Ref<const Eigen::VectorXd>& q_test, const Eigen::MatrixXd& inputs,
                      const BasisSet& basis, double sigma_p);

}  // namespace mgp

#endif  // MGP_KERNEL_HPP
