// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "mgp/bench.hpp"
#include "mgp/clustering.hpp"
#include "mgp/dataset.hpp"
#include "mgp/hyperopt.hpp"
#include "mgp/kernel.hpp"
#include "mgp/regression.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

using namespace mgp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double time_limit;  // seconds, <= 0 for none
    std::function<Outcome()> run;
};

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Log marginal likelihood evaluated densely from the basis definition, with
// the covariance inverted through its eigendecomposition.
double dense_lml(const Dataset& data, const BasisSet& basis, const Hyperparameters& hyper) {
    const Eigen::Index n = data.count();
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            double k = 0.0;
            for (Eigen::Index j = 0; j < basis.size(); ++j) {
                const double h2 = basis.scales(j) * basis.scales(j);
                const double ra = (data.inputs.row(a) - basis.centers.row(j)).squaredNorm();
                const double rb = (data.inputs.row(b) - basis.centers.row(j)).squaredNorm();
                k += std::exp(-ra / h2) * std::exp(-rb / h2);
            }
            cov(a, b) = hyper.sigma_p * hyper.sigma_p * k + (a == b ? hyper.sigma * hyper.sigma : 0.0);
        }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd proj = eig.eigenvectors().transpose() * data.targets;
    const double quad = (proj.array().square() / eig.eigenvalues().array()).sum();
    const double logdet = eig.eigenvalues().array().log().sum();
    return -0.5 * quad - 0.5 * logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

Outcome equivalence() {
    const auto s = equivalence_suite(1, 100);
    const bool pass = s.max_mean_rel <= 1e-8 && s.max_variance_rel <= 1e-8 && s.max_lml_abs <= 1e-6;
    return {pass, fmt("max mean rel %.2e, max variance rel %.2e, max |dLML| %.2e", s.max_mean_rel,
                      s.max_variance_rel, s.max_lml_abs)};
}

Outcome determinant_identity() {
    RandomInstanceLimits limits;
    limits.max_n = 32;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto inst = random_instance(derive_seed(2, i), limits);
        worst = std::max(worst, logdet_identity_residual(inst.data, inst.basis, inst.hyper));
    }
    return {worst <= 1e-8, fmt("max log residual %.2e over 100 instances", worst)};
}

Outcome dense_oracle() {
    RandomInstanceLimits limits;
    limits.max_n = 32;
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 25; ++i) {
        const auto inst = random_instance(derive_seed(3, i), limits);
        const double expect = dense_lml(inst.data, inst.basis, inst.hyper);
        const auto md = train_d(inst.data, inst.basis, inst.hyper, JitterPolicy::none());
        const auto mn = train_n(inst.data, inst.basis, inst.hyper, JitterPolicy::none());
        worst = std::max({worst, std::abs(lml_d(md, inst.data) - expect), std::abs(lml_n(mn, inst.data) - expect)});
    }
    return {worst <= 1e-6, fmt("max |LML - dense| %.2e over 25 instances", worst)};
}

Outcome clustering_invariants() {
    int failures = 0;
    long total_centers = 0;
    for (std::uint64_t set = 0; set < 50; ++set) {
        Rng rng(derive_seed(4, set));
        Eigen::MatrixXd pts(500, 2);
        for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) << rng.uniform(), rng.uniform();

        ScaleConfig cfg;
        cfg.h1 = 0.1 + 0.4 * rng.uniform();
        cfg.beta = 0.3 + 0.5 * rng.uniform();
        cfg.n_scales = 1 + static_cast<int>(rng.index(4));
        cfg.gamma = 0.2 + 0.7 * rng.uniform();
        const auto res = cluster_multiscale(pts, cfg, rng);
        total_centers += res.total();

        std::set<Eigen::Index> rows;
        for (const auto& c : res.centers) rows.insert(c.row);
        bool ok = static_cast<Eigen::Index>(rows.size()) == res.total();

        for (int s = 1; s <= cfg.n_scales; ++s) {
            const double radius = cfg.radius(s);
            for (const auto& [point, center] : res.assignment[static_cast<std::size_t>(s - 1)]) {
                const auto& c = res.centers[static_cast<std::size_t>(center)];
                ok = ok && c.scale == s && (pts.row(point) - pts.row(c.row)).norm() <= radius;
            }
            for (std::size_t a = 0; a < res.centers.size(); ++a)
                for (std::size_t b = a + 1; b < res.centers.size(); ++b)
                    if (res.centers[a].scale == s && res.centers[b].scale == s)
                        ok = ok && (pts.row(res.centers[a].row) - pts.row(res.centers[b].row)).norm() > radius;
        }

        // A finest radius below the smallest gap makes every remaining point a center.
        const double gap = min_pairwise_distance(pts);
        ScaleConfig fine;
        fine.n_scales = 2;
        fine.h1 = 0.3;
        fine.gamma = 0.5;
        fine.beta = 0.5 * gap / (fine.h1 * fine.gamma);
        ok = ok && fine.radius(2) < gap && cluster_multiscale(pts, fine, rng).total() == pts.rows();

        failures += ok ? 0 : 1;
    }
    return {failures == 0, fmt("%d of 50 point sets violated an invariant, %.1f centers per set on average", failures,
                               static_cast<double>(total_centers) / 50.0)};
}

struct StepRun {
    Dataset train;
    NormalizationStats stats;
    Dataset test;
};

StepRun step_run(Eigen::Index n, double noise, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::step;
    spec.n_points = n;
    spec.noise_sigma = noise;
    spec.seed = seed;
    auto split = generate_split(spec);
    auto [train, stats] = normalize(split.train);
    return {std::move(train), std::move(stats), std::move(split.test)};
}

template <class Model, class MeanFn>
double held_out_error(const StepRun& run, const Model& model, MeanFn mean_at) {
    const Eigen::MatrixXd q = run.stats.apply_inputs(run.test.inputs);
    Eigen::VectorXd pred(q.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        pred(i) = run.stats.restore_target(mean_at(model, Eigen::VectorXd(q.row(i).transpose())));
    return normalized_error(pred, run.test.targets);
}

Hyperparameters start_point(double sigma, double gamma, int n_scales = 1) {
    Hyperparameters h;
    h.sigma = sigma;
    h.scales.h1 = 0.1;
    h.scales.gamma = gamma;
    h.scales.n_scales = n_scales;
    return h;
}

Outcome step_sparsity() {
    std::vector<double> sizes;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto run = step_run(128, 0.01, seed);
        OptimizerConfig cfg;
        cfg.seed = seed;
        const auto sparse = optimize(run.train, start_point(0.1, 0.5), cfg);
        const auto basis = cluster_basis(run.train.inputs, sparse.best_hyper.scales, sparse.cluster_seed);
        const double sparse_err = held_out_error(run, train_d(run.train, basis, sparse.best_hyper),
                                                 [](const auto& m, const auto& q) { return predict_mean_d(m, q); });

        OptimizerConfig full_cfg = cfg;
        full_cfg.method = Method::N;
        full_cfg.free_params = {Param::sigma, Param::h1};
        const auto full = optimize(run.train, start_point(0.1, 1e-6), full_cfg);
        const auto full_basis = cluster_basis(run.train.inputs, full.best_hyper.scales, full.cluster_seed);
        if (full_basis.size() != run.train.count()) return {false, "full GP basis is not D = N"};
        const double full_err = held_out_error(run, train_n(run.train, full_basis, full.best_hyper),
                                               [](const auto& m, const auto& q) { return predict_mean_n(m, q); });

        sizes.push_back(static_cast<double>(basis.size()));
        worst_ratio = std::max(worst_ratio, sparse_err / full_err);
    }
    const double med = median(sizes);
    return {med >= 20 && med <= 70 && worst_ratio <= 1.5,
            fmt("median D %.1f (min %.0f, max %.0f), worst error ratio to full GP %.3f", med,
                *std::min_element(sizes.begin(), sizes.end()), *std::max_element(sizes.begin(), sizes.end()),
                worst_ratio)};
}

Outcome sine_plateau() {
    std::vector<double> sizes;
    std::string list;
    for (const Eigen::Index n : {128, 256, 512, 1024}) {
        SyntheticSpec spec;
        spec.kind = SyntheticKind::varfreq_sine;
        spec.n_points = n;
        spec.noise_sigma = 0.01;
        spec.seed = 1;
        const auto train = normalize(generate(spec)).first;
        OptimizerConfig cfg;
        cfg.seed = 1;
        const auto rep = optimize(train, start_point(0.1, 0.5), cfg);
        sizes.push_back(static_cast<double>(rep.basis_size));
        list += (list.empty() ? "" : ", ") + fmt("%ld", static_cast<long>(rep.basis_size));
    }
    const double ratio =
        *std::max_element(sizes.begin(), sizes.end()) / *std::min_element(sizes.begin(), sizes.end());
    return {ratio <= 2.0, "D over N = 128..1024: " + list + fmt("; max/min %.2f", ratio)};
}

Outcome scale_ratio() {
    std::vector<double> dense_ratio, sparse_ratio;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto train = step_run(128, 0.01, seed).train;
        OptimizerConfig cfg;
        cfg.seed = seed;
        const auto gp = optimize_standard_gp(train, StandardGpParams{}, cfg);

        // Every training point carries a basis function, so the model is a
        // Gaussian process whose kernel is a sum of basis products.
        OptimizerConfig dense_cfg = cfg;
        dense_cfg.free_params = {Param::sigma, Param::h1, Param::sigma_p};
        const auto dense = optimize(train, start_point(0.1, 1e-6), dense_cfg);
        dense_ratio.push_back(gp.best.width / dense.best_hyper.scales.h1);

        OptimizerConfig sparse_cfg = cfg;
        sparse_cfg.free_params = {Param::sigma, Param::h1, Param::gamma, Param::sigma_p};
        const auto sparse = optimize(train, start_point(0.1, 0.5), sparse_cfg);
        sparse_ratio.push_back(gp.best.width / sparse.best_hyper.scales.h1);
    }
    const double med = median(dense_ratio);
    return {med >= 1.2 && med <= 1.6,
            fmt("median GP width / basis width %.3f (min %.3f, max %.3f); sparse optimum median %.3f", med,
                *std::min_element(dense_ratio.begin(), dense_ratio.end()),
                *std::max_element(dense_ratio.begin(), dense_ratio.end()), median(sparse_ratio))};
}

Outcome complexity() {
    BenchOptions opts;
    opts.sizes = {512, 1024, 2048, 4096};
    opts.basis_size = 32;
    opts.reps = 5;
    const auto report = bench_scaling(opts);
    auto exponent = [&](const std::string& name) {
        for (const auto& f : report.fits)
            if (f.name == name) return f.fit.exponent;
        return std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<double> mean_d, mean_n;
    for (const auto& r : report.rows) (r.model == "mgp-D" ? mean_d : mean_n).push_back(r.mean_seconds_per_point);
    const double d_ratio =
        *std::max_element(mean_d.begin(), mean_d.end()) / *std::min_element(mean_d.begin(), mean_d.end());
    const double n_growth = mean_n.back() / mean_n.front();
    const double exp_d = exponent("train method D");
    const double exp_n = exponent("train method N");
    return {exp_d < 1.5 && exp_n > 2.5 && d_ratio <= 1.5 && n_growth >= 4.0,
            fmt("train exponents D %.2f, N %.2f; per-point mean time ratio D %.2f, growth N %.2f", exp_d, exp_n,
                d_ratio, n_growth)};
}

Outcome noise_recovery() {
    std::string detail;
    bool pass = true;
    for (const double noise : {0.1, 0.01}) {
        int hits = 0;
        std::vector<double> found;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const auto run = step_run(128, noise, seed);
            OptimizerConfig cfg;
            cfg.seed = seed;
            cfg.starts = 10;
            cfg.free_params = {Param::sigma, Param::h1, Param::gamma, Param::beta, Param::sigma_p};
            const auto rep = optimize(run.train, start_point(0.03, 0.5, 6), cfg);
            const double sigma = rep.best_hyper.sigma * run.stats.y_range;
            found.push_back(sigma);
            hits += (sigma >= noise / 2 && sigma <= noise * 2) ? 1 : 0;
        }
        pass = pass && hits >= 8;
        detail += fmt("%ssigma %.2f: %d/10 within 2x (median %.4f)", detail.empty() ? "" : "; ", noise, hits,
                      median(found));
    }
    return {pass, detail};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "dual-path equivalence", 30.0, equivalence},
        {2, "determinant identity", 10.0, determinant_identity},
        {3, "dense likelihood oracle", 0.0, dense_oracle},
        {4, "clustering invariants", 0.0, clustering_invariants},
        {5, "step sparsity band", 300.0, step_sparsity},
        {6, "sine basis-size plateau", 0.0, sine_plateau},
        {7, "kernel to basis width ratio", 0.0, scale_ratio},
        {8, "complexity exponents", 600.0, complexity},
        {9, "noise recovery", 0.0, noise_recovery},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = out.pass;
        std::string timing = fmt("%.1f s", secs);
        if (c.time_limit > 0) {
            timing += fmt(" (limit %.0f s)", c.time_limit);
            pass = pass && secs < c.time_limit;
        }
        failed += pass ? 0 : 1;
        std::printf("%s criterion %d: %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    out.detail.c_str(), timing.c_str());
        std::fflush(stdout);
    }
    std::printf("EXCLUDED criterion 10: 7-D turbulent-combustion results need an unavailable DNS dataset\n");
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
