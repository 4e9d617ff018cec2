#ifndef MGP_BENCH_HPP
#define MGP_BENCH_HPP

#include "mgp/dataset.hpp"
#include "mgp/hyperopt.hpp"
#include "mgp/regression.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mgp {

/// Median wall-clock seconds over `reps` runs of fn after one discarded warm-up run.
double time_median(const std::function<void()>& fn, int reps = 5);

/// Least-squares fit of log y = log c + exponent * log x.
struct PowerFit {
    double exponent = 0.0;
    double coefficient = 0.0;
    double r2 = 0.0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// A random regression problem for cross-checking the two paths.
struct RandomInstance {
    Dataset data;
    BasisSet basis;
    Hyperparameters hyper;
    Eigen::MatrixXd test_points;
};

struct RandomInstanceLimits {
    Eigen::Index max_n = 64;
    Eigen::Index max_dim = 3;
    double sigma_lo = 0.01;
    double sigma_hi = 1.0;
    double sigma_p_lo = 0.5;
    double sigma_p_hi = 2.0;
    Eigen::Index test_points = 8;
};

/// Inputs uniform in [0,1]^d, a smooth target plus noise, D <= N centers drawn
/// from the inputs with widths from a random three-level ladder.
RandomInstance random_instance(std::uint64_t seed, const RandomInstanceLimits& limits = {});

struct BenchRow {
    std::string experiment;
    std::string model;  // mgp-D, mgp-N, standard-gp
    Eigen::Index n = 0;
    Eigen::Index basis_size = 0;
    double train_seconds = 0.0;
    double mean_seconds_per_point = 0.0;
    double variance_seconds_per_point = 0.0;
    double test_error = 0.0;
    double lml = 0.0;
    std::string note;
};

struct NamedFit {
    std::string name;
    PowerFit fit;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::vector<NamedFit> fits;
    std::vector<std::string> notes;

    std::string table() const;
    std::string csv() const;
};

struct BenchOptions {
    std::vector<Eigen::Index> sizes;  // empty = experiment default
    double noise = 0.01;
    std::uint64_t seed = 1;
    int reps = 5;
    int n_scales = 1;
    Eigen::Index basis_size = 32;       // scaling experiment
    Eigen::Index instances = 100;       // equivalence experiment
    Eigen::Index max_test_points = 2000;  // per-point timing sample
    Eigen::Index full_gp_max_n = 1024;  // larger sizes skip the O(N^3) references
    OptimizerConfig optimizer;
};

/// N sweep on step or sine data: optimized method-D model, method N on the same
/// basis, and an optimized standard GP. Reports D, errors, LML and timings.
BenchReport bench_sweep(SyntheticKind kind, const BenchOptions& opts);
/// Multiscale (opts.n_scales, default 6) against S = 1 on the nonuniform step.
BenchReport bench_nonuniform(const BenchOptions& opts);
/// Fixed hyperparameters and a fixed D-center basis; times training and
/// per-point prediction of both paths over an N sweep and fits exponents.
BenchReport bench_scaling(const BenchOptions& opts);

struct EquivalenceSummary {
    double max_mean_rel = 0.0;
    double max_variance_rel = 0.0;
    double max_lml_abs = 0.0;
    double max_logdet_identity = 0.0;
    Eigen::Index instances = 0;
};
/// Dual-path residuals over random instances.
EquivalenceSummary equivalence_suite(std::uint64_t seed, Eigen::Index instances,
                                     const RandomInstanceLimits& limits = {});
BenchReport bench_equivalence(const BenchOptions& opts);

}  // namespace mgp

#endif  // MGP_BENCH_HPP
