#include "mgp/hyperopt.hpp"

#include "mgp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double& slot(Hyperparameters& h, Param p) {
    switch (p) {
        case Param::sigma: return h.sigma;
        case Param::h1: return h.scales.h1;
        case Param::beta: return h.scales.beta;
        case Param::gamma: return h.scales.gamma;
        case Param::sigma_p: return h.sigma_p;
    }
    throw std::logic_error("unknown parameter");
}

bool uses_logit(Param p) { return p == Param::beta || p == Param::gamma; }

}  // namespace

std::string param_name(Param p) {
    switch (p) {
        case Param::sigma: return "sigma";
        case Param::h1: return "h1";
        case Param::beta: return "beta";
        case Param::gamma: return "gamma";
        case Param::sigma_p: return "sigma_p";
    }
    return "?";
}

Param parse_param(const std::string& name) {
    for (Param p : {Param::sigma, Param::h1, Param::beta, Param::gamma, Param::sigma_p})
        if (param_name(p) == name) return p;
    throw std::invalid_argument("unknown hyperparameter: " + name);
}

std::string termination_name(Termination t) {
    switch (t) {
        case Termination::f_tol: return "f_tol";
        case Termination::x_tol: return "x_tol";
        case Termination::budget: return "budget";
    }
    return "?";
}

void OptimizerConfig::validate() const {
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    if (!(f_tol > 0.0) || !(x_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
    if (!(reflection > 0.0) || !(expansion > 1.0) || !(expansion > reflection) || !(contraction > 0.0) ||
        !(contraction < 1.0) || !(shrink > 0.0) || !(shrink < 1.0))
        throw std::invalid_argument("Nelder-Mead coefficients out of range");
    if (free_params.empty()) throw std::invalid_argument("at least one free hyperparameter is required");
    if (starts < 1) throw std::invalid_argument("starts must be >= 1");
}

Eigen::VectorXd transform(const Hyperparameters& hyper, std::span<const Param> free_params) {
    hyper.validate();
    Eigen::VectorXd x(static_cast<Eigen::Index>(free_params.size()));
    Hyperparameters h = hyper;
    for (std::size_t i = 0; i < free_params.size(); ++i) {
        const double v = slot(h, free_params[i]);
        x(static_cast<Eigen::Index>(i)) = uses_logit(free_params[i]) ? logit(v) : std::log(v);
    }
    return x;
}

Hyperparameters untransform(const Eigen::VectorXd& x, std::span<const Param> free_params,
                            const Hyperparameters& base) {
    if (x.size() != static_cast<Eigen::Index>(free_params.size()))
        throw std::invalid_argument("untransform: vector length does not match the free parameters");
    Hyperparameters h = base;
    for (std::size_t i = 0; i < free_params.size(); ++i) {
        const double v = x(static_cast<Eigen::Index>(i));
        slot(h, free_params[i]) = uses_logit(free_params[i]) ? logistic(v) : std::exp(v);
    }
    return h;
}

BasisSet cluster_basis(const Eigen::MatrixXd& inputs, const ScaleConfig& cfg, std::uint64_t cluster_seed) {
    Rng rng(cluster_seed);
    const auto clusters = cluster_multiscale(inputs, cfg, rng);
    return make_basis(inputs, clusters, cfg);
}

ObjectiveValue objective(const Dataset& data, const Hyperparameters& hyper, Method method,
                         std::uint64_t cluster_seed) {
    try {
        hyper.validate();
        const BasisSet basis = cluster_basis(data.inputs, hyper.scales, cluster_seed);
        const double lml = method == Method::D ? train_d(data, basis, hyper).lml : train_n(data, basis, hyper).lml;
        if (!std::isfinite(lml)) return {kInf, basis.size()};
        return {-lml, basis.size()};
    } catch (const NotPositiveDefinite&) {
        return {kInf, 0};
    } catch (const std::invalid_argument&) {
        return {kInf, 0};
    }
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const OptimizerConfig& cfg) {
    cfg.validate();
    if (!x0.allFinite()) throw std::invalid_argument("nelder_mead: starting point must be finite");

    const auto n = x0.size();
    NelderMeadResult result;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++result.evaluations;
        const double v = f(x);
        return std::isnan(v) ? kInf : v;
    };

    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> values(static_cast<std::size_t>(n + 1));
    values[0] = eval(x0);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& v = simplex[static_cast<std::size_t>(i + 1)];
        v(i) += 0.05 * (1.0 + std::abs(x0(i)));
        values[static_cast<std::size_t>(i + 1)] = eval(v);
    }

    std::vector<std::size_t> order(simplex.size());
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> v2;
        s2.reserve(order.size());
        v2.reserve(order.size());
        for (auto i : order) {
            s2.push_back(std::move(simplex[i]));
            v2.push_back(values[i]);
        }
        simplex = std::move(s2);
        values = std::move(v2);
    };

    const std::size_t worst = static_cast<std::size_t>(n);
    while (true) {
        sort_simplex();
        const double spread = values[worst] - values[0];
        double diameter = 0.0;
        for (std::size_t i = 1; i <= worst; ++i)
            diameter = std::max(diameter, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
        if (std::isfinite(values[0]) && spread < cfg.f_tol) {
            result.reason = Termination::f_tol;
            break;
        }
        if (diameter < cfg.x_tol) {
            result.reason = Termination::x_tol;
            break;
        }
        if (result.iterations >= cfg.max_iters) {
            result.reason = Termination::budget;
            break;
        }
        ++result.iterations;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd xr = centroid + cfg.reflection * (centroid - simplex[worst]);
        const double fr = eval(xr);
        bool shrink = false;
        if (fr < values[0]) {
            const Eigen::VectorXd xe = centroid + cfg.expansion * (centroid - simplex[worst]);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
        } else if (fr < values[worst - 1]) {
            simplex[worst] = xr;
            values[worst] = fr;
        } else if (fr < values[worst]) {
            const Eigen::VectorXd xc = centroid + cfg.contraction * (xr - centroid);
            const double fc = eval(xc);
            if (fc <= fr) {
                simplex[worst] = xc;
                values[worst] = fc;
            } else {
                shrink = true;
            }
        } else {
            const Eigen::VectorXd xcc = centroid + cfg.contraction * (simplex[worst] - centroid);
            const double fcc = eval(xcc);
            if (fcc < values[worst]) {
                simplex[worst] = xcc;
                values[worst] = fcc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t i = 1; i <= worst; ++i) {
                simplex[i] = simplex[0] + cfg.shrink * (simplex[i] - simplex[0]);
                values[i] = eval(simplex[i]);
            }
        }
        result.best_history.push_back(*std::min_element(values.begin(), values.end()));
    }
    result.x = simplex[0];
    result.fx = values[0];
    return result;
}

OptimizationReport optimize(const Dataset& data, const Hyperparameters& initial, const OptimizerConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd x0 = transform(initial, cfg.free_params);

    OptimizationReport best;
    best.best_lml = -kInf;
    bool have_best = false;
    int total_iterations = 0;
    int total_evaluations = 0;
    for (int start = 0; start < cfg.starts; ++start) {
        const auto stream = static_cast<std::uint64_t>(start);
        const std::uint64_t cluster_seed = derive_seed(cfg.seed, 2 * stream);
        Eigen::VectorXd xs = x0;
        if (start > 0) {
            Rng rng(derive_seed(cfg.seed, 2 * stream + 1));
            for (Eigen::Index i = 0; i < xs.size(); ++i) xs(i) += 0.5 * rng.normal();
        }
        auto f = [&](const Eigen::VectorXd& x) {
            return objective(data, untransform(x, cfg.free_params, initial), cfg.method, cluster_seed).neg_lml;
        };
        auto run = nelder_mead(f, xs, cfg);
        total_iterations += run.iterations;
        total_evaluations += run.evaluations;
        // A collapsed simplex can stall on the flat pieces the clustering step
        // creates; restart from the best vertex until a restart stops helping.
        for (int r = 0; r < cfg.restarts && std::isfinite(run.fx); ++r) {
            auto again = nelder_mead(f, run.x, cfg);
            total_iterations += again.iterations;
            total_evaluations += again.evaluations;
            const bool improved = again.fx < run.fx - cfg.f_tol;
            if (again.fx < run.fx) {
                for (double v : again.best_history) run.best_history.push_back(std::min(v, run.fx));
                run.x = again.x;
                run.fx = again.fx;
                run.reason = again.reason;
            }
            if (!improved) break;
        }
        if (!std::isfinite(run.fx)) continue;
        if (!have_best || -run.fx > best.best_lml) {
            have_best = true;
            best.best_hyper = untransform(run.x, cfg.free_params, initial);
            best.best_lml = -run.fx;
            best.reason = run.reason;
            best.cluster_seed = cluster_seed;
            best.basis_size = objective(data, best.best_hyper, cfg.method, cluster_seed).basis_size;
            best.best_history.clear();
            for (double v : run.best_history) best.best_history.push_back(-v);
        }
    }
    if (!have_best) throw NotPositiveDefinite("optimize: every start failed to produce a finite likelihood");
    best.iterations = total_iterations;
    best.evaluations = total_evaluations;
    return best;
}

StandardGpReport optimize_standard_gp(const Dataset& data, const StandardGpParams& initial,
                                      const OptimizerConfig& cfg, bool fit_amplitude) {
    OptimizerConfig local = cfg;
    local.free_params = {Param::sigma, Param::h1};
    local.validate();

    auto params_at = [&](const Eigen::VectorXd& x) {
        StandardGpParams p = initial;
        p.sigma = std::exp(x(0));
        p.width = std::exp(x(1));
        if (fit_amplitude) p.amplitude = std::exp(x(2));
        return p;
    };
    auto f = [&](const Eigen::VectorXd& x) {
        try {
            const double lml = train_standard_gp(data, params_at(x)).lml;
            return std::isfinite(lml) ? -lml : kInf;
        } catch (const NotPositiveDefinite&) {
            return kInf;
        } catch (const std::invalid_argument&) {
            return kInf;
        }
    };

    Eigen::VectorXd x0(fit_amplitude ? 3 : 2);
    x0(0) = std::log(initial.sigma);
    x0(1) = std::log(initial.width);
    if (fit_amplitude) x0(2) = std::log(initial.amplitude);

    StandardGpReport best;
    best.best_lml = -kInf;
    bool have_best = false;
    for (int start = 0; start < local.starts; ++start) {
        Eigen::VectorXd xs = x0;
        if (start > 0) {
            Rng rng(derive_seed(local.seed, 2 * static_cast<std::uint64_t>(start) + 1));
            for (Eigen::Index i = 0; i < xs.size(); ++i) xs(i) += 0.5 * rng.normal();
        }
        const auto run = nelder_mead(f, xs, local);
        best.evaluations += run.evaluations;
        if (!std::isfinite(run.fx)) continue;
        if (!have_best || -run.fx > best.best_lml) {
            have_best = true;
            best.best = params_at(run.x);
            best.best_lml = -run.fx;
            best.reason = run.reason;
        }
    }
    if (!have_best) throw NotPositiveDefinite("optimize_standard_gp: every start failed");
    return best;
}

}  // namespace mgp
