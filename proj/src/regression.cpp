#include "mgp/regression.hpp"

#include "mgp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mgp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

void check_inputs(const Dataset& data, const BasisSet& basis) {
    if (data.count() < 1) throw std::invalid_argument("training set is empty");
    if (basis.size() < 1) throw std::invalid_argument("basis is empty");
    if (data.dim() != basis.dim()) throw std::invalid_argument("basis and data dimensions differ");
}

double weight_space_lml(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const CholeskyFactor& l,
                        const Eigen::VectorXd& w, double sigma, double sigma_p) {
    const auto n = static_cast<double>(y.size());
    const auto d = static_cast<double>(w.size());
    const double s2 = sigma * sigma;
    const Eigen::VectorXd resid = y - phi.transpose() * w;
    return -resid.dot(y) / (2.0 * s2) - 0.5 * logdet(l) - 0.5 * n * (kLog2Pi + std::log(s2)) -
           0.5 * d * std::log(sigma_p * sigma_p);
}

double function_space_lml(const Eigen::VectorXd& y, const Eigen::VectorXd& alpha, const CholeskyFactor& l) {
    return -0.5 * y.dot(alpha) - 0.5 * logdet(l) - 0.5 * static_cast<double>(y.size()) * kLog2Pi;
}

void check_point(const Eigen::Ref<const Eigen::VectorXd>& q, Eigen::Index dim) {
    if (q.size() != dim)
        throw std::invalid_argument("test point has dimension " + std::to_string(q.size()) + ", model expects " +
                                    std::to_string(dim));
}

template <class Model, class Predict>
std::vector<Prediction> batch(const Model& model, const Eigen::MatrixXd& inputs, Predict predict) {
    std::vector<Prediction> out(static_cast<std::size_t>(inputs.rows()));
    parallel_for(out.size(), [&](std::size_t i) {
        const Eigen::VectorXd q = inputs.row(static_cast<Eigen::Index>(i)).transpose();
        out[i] = predict(model, q);
    });
    return out;
}

}  // namespace

void Hyperparameters::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive and finite");
    if (!(sigma_p > 0.0) || !std::isfinite(sigma_p))
        throw std::invalid_argument("sigma_p must be positive and finite");
    scales.validate();
}

MethodDModel train_d(const Dataset& data, const BasisSet& basis, const Hyperparameters& hyper, JitterPolicy jitter) {
    hyper.validate();
    check_inputs(data, basis);
    const double s2 = hyper.sigma * hyper.sigma;

    const Eigen::MatrixXd phi = design_matrix(data.inputs, basis);
    Eigen::MatrixXd precision = gram(phi) / s2;
    precision.diagonal().array() += 1.0 / (hyper.sigma_p * hyper.sigma_p);

    MethodDModel model;
    model.chol_precision = cholesky(precision, jitter);
    model.weights = solve_spd(model.chol_precision, phi * data.targets) / s2;
    model.basis = basis;
    model.hyper = hyper;
    model.norm = NormalizationStats::identity(data.dim());
    model.train_count = data.count();
    model.lml = weight_space_lml(phi, data.targets, model.chol_precision, model.weights, hyper.sigma, hyper.sigma_p);
    return model;
}

Prediction predict_d(const MethodDModel& model, const Eigen::Ref<const Eigen::VectorXd>& q) {
    check_point(q, model.basis.dim());
    const Eigen::VectorXd phi = features(model.basis, q);
    const Eigen::VectorXd v = solve_lower(model.chol_precision, phi);
    return {phi.dot(model.weights), v.squaredNorm() + model.hyper.sigma * model.hyper.sigma};
}

double predict_mean_d(const MethodDModel& model, const Eigen::Ref<const Eigen::VectorXd>& q) {
    check_point(q, model.basis.dim());
    return features(model.basis, q).dot(model.weights);
}

double lml_d(const MethodDModel& model, const Dataset& data) {
    const Eigen::MatrixXd phi = design_matrix(data.inputs, model.basis);
    return weight_space_lml(phi, data.targets, model.chol_precision, model.weights, model.hyper.sigma,
                            model.hyper.sigma_p);
}

MethodNModel train_n(const Dataset& data, const BasisSet& basis, const Hyperparameters& hyper, JitterPolicy jitter,
                     Eigen::Index max_points) {
    hyper.validate();
    check_inputs(data, basis);
    if (data.count() > max_points)
        throw std::invalid_argument("method N refuses " + std::to_string(data.count()) + " training points (limit " +
                                    std::to_string(max_points) + ")");

    MethodNModel model;
    model.design = design_matrix(data.inputs, basis);
    Eigen::MatrixXd cov = kernel_from_design(model.design, hyper.sigma_p);
    cov.diagonal().array() += hyper.sigma * hyper.sigma;
    model.chol_cov = cholesky(cov, jitter);
    cov.resize(0, 0);
    model.alpha = solve_spd(model.chol_cov, data.targets);
    model.training_inputs = data.inputs;
    model.basis = basis;
    model.hyper = hyper;
    model.norm = NormalizationStats::identity(data.dim());
    model.lml = function_space_lml(data.targets, model.alpha, model.chol_cov);
    return model;
}

Prediction predict_n(const MethodNModel& model, const Eigen::Ref<const Eigen::VectorXd>& q) {
    check_point(q, model.basis.dim());
    const double sp2 = model.hyper.sigma_p * model.hyper.sigma_p;
    const Eigen::VectorXd phi = features(model.basis, q);
    const Eigen::VectorXd k = sp2 * (model.design.transpose() * phi);
    const double kss = sp2 * phi.squaredNorm();
    const Eigen::VectorXd v = solve_lower(model.chol_cov, k);
    // kss - |v|^2 is a posterior variance and cannot be negative; clamp round-off.
    const double reduced = std::max(0.0, kss - v.squaredNorm());
    return {k.dot(model.alpha), reduced + model.hyper.sigma * model.hyper.sigma};
}

double predict_mean_n(const MethodNModel& model, const Eigen::Ref<const Eigen::VectorXd>& q) {
    check_point(q, model.basis.dim());
    const double sp2 = model.hyper.sigma_p * model.hyper.sigma_p;
    const Eigen::VectorXd k = sp2 * (model.design.transpose() * features(model.basis, q));
    return k.dot(model.alpha);
}

double lml_n(const MethodNModel& model, const Dataset& data) {
    return function_space_lml(data.targets, model.alpha, model.chol_cov);
}

double logdet_identity_residual(const Dataset& data, const BasisSet& basis, const Hyperparameters& hyper) {
    hyper.validate();
    check_inputs(data, basis);
    if (data.count() > 512) throw std::invalid_argument("logdet_identity_residual: limited to N <= 512");

    const auto n = static_cast<double>(data.count());
    const auto d = static_cast<double>(basis.size());
    const double s2 = hyper.sigma * hyper.sigma;
    const Eigen::MatrixXd phi = design_matrix(data.inputs, basis);

    Eigen::MatrixXd precision = gram(phi) / s2;
    precision.diagonal().array() += 1.0 / (hyper.sigma_p * hyper.sigma_p);
    Eigen::MatrixXd cov = kernel_from_design(phi, hyper.sigma_p);
    cov.diagonal().array() += s2;

    const double lhs = -n * std::log(s2) - logdet(cholesky(precision, JitterPolicy::none())) -
                       d * std::log(hyper.sigma_p * hyper.sigma_p);
    const double rhs = -logdet(cholesky(cov, JitterPolicy::none()));
    return std::abs(lhs - rhs);
}

std::vector<Prediction> predict_batch(const MethodDModel& model, const Eigen::MatrixXd& inputs) {
    return batch(model, inputs, [](const MethodDModel& m, const Eigen::VectorXd& q) { return predict_d(m, q); });
}

std::vector<Prediction> predict_batch(const MethodNModel& model, const Eigen::MatrixXd& inputs) {
    return batch(model, inputs, [](const MethodNModel& m, const Eigen::VectorXd& q) { return predict_n(m, q); });
}

namespace {

double sq_dist(const Eigen::MatrixXd& a, Eigen::Index i, const Eigen::Ref<const Eigen::VectorXd>& q) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        const double t = a(i, k) - q(k);
        s += t * t;
    }
    return s;
}

}  // namespace

StandardGpModel train_standard_gp(const Dataset& data, const StandardGpParams& params, JitterPolicy jitter) {
    if (!(params.sigma > 0.0) || !(params.width > 0.0) || !(params.amplitude > 0.0) ||
        !std::isfinite(params.sigma) || !std::isfinite(params.width) || !std::isfinite(params.amplitude))
        throw std::invalid_argument("standard GP parameters must be positive and finite");
    if (data.count() < 1) throw std::invalid_argument("training set is empty");

    const auto n = data.count();
    const double a2 = params.amplitude * params.amplitude;
    const double inv_w2 = 1.0 / (params.width * params.width);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::VectorXd qj = data.inputs.row(j).transpose();
        for (Eigen::Index i = j; i < n; ++i) {
            const double v = a2 * std::exp(-sq_dist(data.inputs, i, qj) * inv_w2);
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    cov.diagonal().array() += params.sigma * params.sigma;

    StandardGpModel model;
    model.params = params;
    model.chol_cov = cholesky(cov, jitter);
    model.alpha = solve_spd(model.chol_cov, data.targets);
    model.training_inputs = data.inputs;
    model.lml = function_space_lml(data.targets, model.alpha, model.chol_cov);
    return model;
}

Prediction predict_standard_gp(const StandardGpModel& model, const Eigen::Ref<const Eigen::VectorXd>& q) {
    check_point(q, model.training_inputs.cols());
    const auto n = model.training_inputs.rows();
    const double a2 = model.params.amplitude * model.params.amplitude;
    const double inv_w2 = 1.0 / (model.params.width * model.params.width);
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) k(i) = a2 * std::exp(-sq_dist(model.training_inputs, i, q) * inv_w2);
    const Eigen::VectorXd v = solve_lower(model.chol_cov, k);
    const double reduced = std::max(0.0, a2 - v.squaredNorm());
    return {k.dot(model.alpha), reduced + model.params.sigma * model.params.sigma};
}

}  // namespace mgp
