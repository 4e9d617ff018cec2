#ifndef MGP_REGRESSION_HPP
#define MGP_REGRESSION_HPP

#include "mgp/clustering.hpp"
#include "mgp/dataset.hpp"
#include "mgp/kernel.hpp"
#include "mgp/linalg.hpp"

#include <Eigen/Core>

#include <vector>

namespace mgp {

/// Noise std sigma, prior weight std sigma_p (Sigma_p = sigma_p^2 I) and the scale ladder.
struct Hyperparameters {
    double sigma = 0.1;
    double sigma_p = 1.0;
    ScaleConfig scales;

    void validate() const;
};

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

/// Weight-space model: everything lives in D x D matrices.
///
/// Training forms Sigma^-1 = Phi Phi^T / sigma^2 + I / sigma_p^2 (O(N D^2)),
/// factors it as L_D L_D^T and solves for the posterior mean weights
/// w = solve(Sigma^-1, Phi y) / sigma^2. Prediction costs O(D) for the mean
/// and one D x D triangular solve for the variance.
struct MethodDModel {
    BasisSet basis;
    CholeskyFactor chol_precision;  // L_D
    Eigen::VectorXd weights;        // posterior mean weights
    Hyperparameters hyper;
    NormalizationStats norm;
    double lml = 0.0;
    Eigen::Index train_count = 0;
};

/// Function-space model on the N x N matrix K + sigma^2 I = L_N L_N^T.
struct MethodNModel {
    BasisSet basis;
    CholeskyFactor chol_cov;  // L_N
    Eigen::VectorXd alpha;    // (K + sigma^2 I)^-1 y
    Eigen::MatrixXd training_inputs;
    Eigen::MatrixXd design;   // Phi for the training inputs, cached for k_*
    Hyperparameters hyper;
    NormalizationStats norm;
    double lml = 0.0;
};

MethodDModel train_d(const Dataset& data, const BasisSet& basis, const Hyperparameters& hyper,
                     JitterPolicy jitter = {});
Prediction predict_d(const MethodDModel& model, const Eigen::Ref<const Eigen::VectorXd>& q);
/// Mean only: phi(q)^T w, O(D).
double predict_mean_d(const MethodDModel& model, const Eigen::Ref<const Eigen::VectorXd>& q);
/// Log marginal likelihood from the D x D factorization:
///   -(y - Phi^T w)^T y / (2 sigma^2) - sum log L_D,jj - (N/2) log(2 pi sigma^2) - (D/2) log sigma_p^2
double lml_d(const MethodDModel& model, const Dataset& data);

/// Method N refuses more than this many training points unless the limit is raised.
inline constexpr Eigen::Index kMethodNDefaultLimit = 20000;

MethodNModel train_n(const Dataset& data, const BasisSet& basis, const Hyperparameters& hyper,
                     JitterPolicy jitter = {}, Eigen::Index max_points = kMethodNDefaultLimit);
Prediction predict_n(const MethodNModel& model, const Eigen::Ref<const Eigen::VectorXd>& q);
/// Mean only: k_*^T alpha, O(N D) for building k_*.
double predict_mean_n(const MethodNModel& model, const Eigen::Ref<const Eigen::VectorXd>& q);
/// -y^T alpha / 2 - sum log L_N,nn - (N/2) log(2 pi)
double lml_n(const MethodNModel& model, const Dataset& data);

/// |log(sigma^-2N |Sigma| / |Sigma_p|) - log(1 / |K + sigma^2 I|)| with both
/// determinants taken from unjittered Cholesky factors. Limited to N <= 512.
double logdet_identity_residual(const Dataset& data, const BasisSet& basis, const Hyperparameters& hyper);

/// Predictions for every row of `inputs`, fanned out over worker threads.
std::vector<Prediction> predict_batch(const MethodDModel& model, const Eigen::MatrixXd& inputs);
std::vector<Prediction> predict_batch(const MethodNModel& model, const Eigen::MatrixXd& inputs);

/// Conventional full GP with the Gaussian kernel amplitude^2 * exp(-r^2 / width^2),
/// used as the non-sparse reference.
struct StandardGpParams {
    double sigma = 0.1;
    double width = 0.1;
    double amplitude = 1.0;
};

struct StandardGpModel {
    StandardGpParams params;
    CholeskyFactor chol_cov;
    Eigen::VectorXd alpha;
    Eigen::MatrixXd training_inputs;
    double lml = 0.0;
};

StandardGpModel train_standard_gp(const Dataset& data, const StandardGpParams& params, JitterPolicy jitter = {});
Prediction predict_standard_gp(const StandardGpModel& model, const Eigen::Ref<const Eigen::VectorXd>& q);

}  // namespace mgp

#endif  // MGP_REGRESSION_HPP
