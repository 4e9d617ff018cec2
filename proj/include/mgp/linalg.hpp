#ifndef MGP_LINALG_HPP
#define MGP_LINALG_HPP

#include <Eigen/Core>

#include <stdexcept>

namespace mgp {

class NotPositiveDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AsymmetricInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Diagonal loading applied when a factorization fails: delta starts at
/// relative_eps * mean(diag) and doubles on every retry.
struct JitterPolicy {
    double relative_eps = 1e-10;
    int max_retries = 5;

    static constexpr JitterPolicy none() { return {0.0, 0}; }
};

/// Lower-triangular L with M (+ jitter * I) = L * L^T.
class CholeskyFactor {
public:
    CholeskyFactor() = default;
    /// Adopts an existing factor. Throws std::invalid_argument unless `lower`
    /// is square, lower-triangular and has a positive diagonal.
    explicit CholeskyFactor(Eigen::MatrixXd lower, double jitter = 0.0);

    const Eigen::MatrixXd& lower() const noexcept { return lower_; }
    Eigen::Index order() const noexcept { return lower_.rows(); }
    /// Diagonal load that was added before the factorization succeeded.
    double jitter() const noexcept { return jitter_; }

    /// L * L^T.
    Eigen::MatrixXd reconstruct() const;

private:
    Eigen::MatrixXd lower_;
    double jitter_ = 0.0;
};

/// Factors a symmetric matrix. Throws AsymmetricInput when
/// max|m - m^T| > 1e-10 * ||m||_F, and NotPositiveDefinite once the jitter
/// retries are exhausted.
CholeskyFactor cholesky(const Eigen::MatrixXd& m, JitterPolicy policy = {});

Eigen::VectorXd solve_lower(const CholeskyFactor& l, const Eigen::VectorXd& b);
Eigen::VectorXd solve_upper(const CholeskyFactor& l, const Eigen::VectorXd& b);
/// x with (L L^T) x = b.
Eigen::VectorXd solve_spd(const CholeskyFactor& l, const Eigen::VectorXd& b);

/// log det(L L^T) = 2 * sum log L_ii.
double logdet(const CholeskyFactor& l);

}  // namespace mgp

#endif  // MGP_LINALG_HPP
