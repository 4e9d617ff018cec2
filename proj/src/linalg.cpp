#include "mgp/linalg.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <string>

namespace mgp {

CholeskyFactor::CholeskyFactor(Eigen::MatrixXd lower, double jitter) : lower_(std::move(lower)), jitter_(jitter) {
    if (lower_.rows() != lower_.cols()) throw std::invalid_argument("cholesky factor must be square");
    for (Eigen::Index i = 0; i < lower_.rows(); ++i) {
        if (!(lower_(i, i) > 0.0)) throw std::invalid_argument("cholesky factor diagonal must be positive");
        for (Eigen::Index j = i + 1; j < lower_.cols(); ++j)
            if (lower_(i, j) != 0.0) throw std::invalid_argument("cholesky factor must be lower-triangular");
    }
}

Eigen::MatrixXd CholeskyFactor::reconstruct() const {
    return lower_.triangularView<Eigen::Lower>() * lower_.transpose();
}

CholeskyFactor cholesky(const Eigen::MatrixXd& m, JitterPolicy policy) {
    if (m.rows() != m.cols()) throw std::invalid_argument("cholesky: matrix must be square");
    const auto n = m.rows();
    const double norm = m.norm();
    double asym = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) asym = std::max(asym, std::abs(m(i, j) - m(j, i)));
    if (asym > 1e-10 * norm) throw AsymmetricInput("cholesky: input is not symmetric");

    const double mean_diag = n > 0 ? m.diagonal().mean() : 0.0;
    double delta = 0.0;
    Eigen::MatrixXd work;
    for (int attempt = 0; attempt <= policy.max_retries; ++attempt) {
        if (attempt > 0) delta = attempt == 1 ? policy.relative_eps * std::abs(mean_diag) : 2.0 * delta;
        work = m;
        if (delta > 0.0) work.diagonal().array() += delta;
        // Factors in place; only the lower triangle of `work` is read and written.
        Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>, Eigen::Lower> llt(work);
        if (llt.info() != Eigen::Success) continue;
        if (!work.diagonal().allFinite() || !(work.diagonal().array() > 0.0).all()) continue;
        work.triangularView<Eigen::StrictlyUpper>().setZero();
        return CholeskyFactor(std::move(work), delta);
    }
    throw NotPositiveDefinite("cholesky: matrix of order " + std::to_string(n) +
                              " is not positive definite after " + std::to_string(policy.max_retries) +
                              " jitter retries");
}

namespace {
void check_dims(const CholeskyFactor& l, const Eigen::VectorXd& b) {
    if (l.order() != b.size()) throw std::invalid_argument("triangular solve: dimension mismatch");
}
}  // namespace

Eigen::VectorXd solve_lower(const CholeskyFactor& l, const Eigen::VectorXd& b) {
    check_dims(l, b);
    return l.lower().triangularView<Eigen::Lower>().solve(b);
}

Eigen::VectorXd solve_upper(const CholeskyFactor& l, const Eigen::VectorXd& b) {
    check_dims(l, b);
    return l.lower().transpose().triangularView<Eigen::Upper>().solve(b);
}

Eigen::VectorXd solve_spd(const CholeskyFactor& l, const Eigen::VectorXd& b) { return solve_upper(l, solve_lower(l, b)); }

double logdet(const CholeskyFactor& l) { return 2.0 * l.lower().diagonal().array().log().sum(); }

}  // namespace mgp
