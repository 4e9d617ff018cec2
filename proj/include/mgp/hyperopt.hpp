#ifndef MGP_HYPEROPT_HPP
#define MGP_HYPEROPT_HPP

#include "mgp/dataset.hpp"
#include "mgp/regression.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mgp {

enum class Method { D, N };

enum class Param { sigma, h1, beta, gamma, sigma_p };

std::string param_name(Param p);
Param parse_param(const std::string& name);

enum class Termination { f_tol, x_tol, budget };

std::string termination_name(Termination t);

struct OptimizerConfig {
    int max_iters = 500;
    double f_tol = 1e-6;
    double x_tol = 1e-6;
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    std::uint64_t seed = 0;
    std::vector<Param> free_params{Param::sigma, Param::h1, Param::gamma};
    int starts = 3;
    int restarts = 0;  // Nelder-Mead restarts from the converged point, per start
    Method method = Method::D;

    void validate() const;
};

/// Unconstrained coordinates for the free parameters: log for sigma, sigma_p
/// and h1; logit for beta and gamma. Throws std::invalid_argument when a
/// value is outside its valid range.
Eigen::VectorXd transform(const Hyperparameters& hyper, std::span<const Param> free_params);
/// Inverse of transform; parameters not listed keep their value from `base`.
Hyperparameters untransform(const Eigen::VectorXd& x, std::span<const Param> free_params,
                            const Hyperparameters& base);

struct ObjectiveValue {
    double neg_lml = 0.0;  // +inf when the hyperparameters are invalid or a factorization fails
    Eigen::Index basis_size = 0;
};

/// Negative log marginal likelihood. Clusters the inputs with a fixed seed,
/// builds the multiscale basis and trains the chosen path, so the result is a
/// deterministic function of the arguments.
ObjectiveValue objective(const Dataset& data, const Hyperparameters& hyper, Method method,
                         std::uint64_t cluster_seed);

/// Basis obtained by clustering `inputs` with the given ladder and seed.
BasisSet cluster_basis(const Eigen::MatrixXd& inputs, const ScaleConfig& cfg, std::uint64_t cluster_seed);

struct NelderMeadResult {
    Eigen::VectorXd x;
    double fx = 0.0;
    int iterations = 0;
    int evaluations = 0;
    Termination reason = Termination::budget;
    std::vector<double> best_history;  // best f after each iteration
};

/// Nelder-Mead minimization. The initial simplex steps each coordinate by
/// 0.05 * (1 + |x0_i|); the run stops when the spread of simplex values drops
/// below f_tol, the simplex diameter (max-norm to the best vertex) below
/// x_tol, or after max_iters iterations.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const OptimizerConfig& cfg);

struct OptimizationReport {
    Hyperparameters best_hyper;
    double best_lml = 0.0;
    int iterations = 0;
    int evaluations = 0;
    Eigen::Index basis_size = 0;
    Termination reason = Termination::budget;
    std::uint64_t cluster_seed = 0;  // seed that reproduces the winning basis
    std::vector<double> best_history;  // best LML after each iteration of the winning start
};

/// Multi-start maximization of the log marginal likelihood. Start k uses a
/// cluster seed and (for k > 0) a perturbed starting point derived from cfg.seed.
OptimizationReport optimize(const Dataset& data, const Hyperparameters& initial, const OptimizerConfig& cfg);

struct StandardGpReport {
    StandardGpParams best;
    double best_lml = 0.0;
    int evaluations = 0;
    Termination reason = Termination::budget;
};

/// Maximizes the standard GP likelihood over log sigma, log width and,
/// unless disabled, log amplitude.
StandardGpReport optimize_standard_gp(const Dataset& data, const StandardGpParams& initial,
                                      const OptimizerConfig& cfg, bool fit_amplitude = true);

}  // namespace mgp

#endif  // MGP_HYPEROPT_HPP
