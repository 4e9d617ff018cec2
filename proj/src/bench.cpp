#include "mgp/bench.hpp"

#include "mgp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace mgp {

namespace {

std::vector<double> sorted_samples(const std::function<void()>& fn, int reps) {
    using clock = std::chrono::steady_clock;
    fn();
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(std::max(reps, 1)));
    for (int r = 0; r < std::max(reps, 1); ++r) {
        const auto start = clock::now();
        fn();
        t.push_back(std::chrono::duration<double>(clock::now() - start).count());
    }
    std::sort(t.begin(), t.end());
    return t;
}

}  // namespace

double time_median(const std::function<void()>& fn, int reps) {
    const auto t = sorted_samples(fn, reps);
    const std::size_t m = t.size() / 2;
    return t.size() % 2 ? t[m] : 0.5 * (t[m - 1] + t[m]);
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_power_law: need >= 2 matching points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    PowerFit fit;
    const double denom = n * sxx - sx * sx;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.coefficient = std::exp(intercept);
    const double mean_y = sy / n;
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + fit.exponent * lx[i]);
        ss_res += r * r;
        ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

RandomInstance random_instance(std::uint64_t seed, const RandomInstanceLimits& limits) {
    Rng rng(seed);
    auto log_uniform = [&](double lo, double hi) { return lo * std::exp(std::log(hi / lo) * rng.uniform()); };

    const auto d = 1 + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(limits.max_dim)));
    const auto n = 2 + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(limits.max_n - 1)));
    const auto D = 1 + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n)));

    Eigen::MatrixXd q(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            q(i, k) = rng.uniform();
            s += q(i, k);
        }
        y(i) = std::sin(3.0 * s) + 0.1 * rng.normal();
    }

    RandomInstance inst;
    inst.hyper.sigma = log_uniform(limits.sigma_lo, limits.sigma_hi);
    inst.hyper.sigma_p = log_uniform(limits.sigma_p_lo, limits.sigma_p_hi);
    inst.hyper.scales.n_scales = 3;
    inst.hyper.scales.h1 = log_uniform(0.1, 1.0);
    inst.hyper.scales.beta = 0.3 + 0.5 * rng.uniform();
    inst.hyper.scales.gamma = 0.5;

    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    Eigen::MatrixXd centers(D, d);
    Eigen::VectorXd scales(D);
    std::vector<int> levels(static_cast<std::size_t>(D));
    for (Eigen::Index j = 0; j < D; ++j) {
        const auto pick = j + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n - j)));
        std::swap(rows[static_cast<std::size_t>(j)], rows[static_cast<std::size_t>(pick)]);
        centers.row(j) = q.row(rows[static_cast<std::size_t>(j)]);
        const int level = 1 + static_cast<int>(rng.index(3));
        levels[static_cast<std::size_t>(j)] = level;
        scales(j) = inst.hyper.scales.scale(level);
    }
    inst.basis = BasisSet(std::move(centers), std::move(scales));
    inst.basis.levels = std::move(levels);

    inst.test_points.resize(limits.test_points, d);
    for (Eigen::Index i = 0; i < limits.test_points; ++i)
        for (Eigen::Index k = 0; k < d; ++k) inst.test_points(i, k) = -0.2 + 1.4 * rng.uniform();
    inst.data = Dataset(std::move(q), std::move(y));
    return inst;
}

namespace {

BenchRow make_row(std::string experiment, std::string model, Eigen::Index n, Eigen::Index basis_size) {
    BenchRow r;
    r.experiment = std::move(experiment);
    r.model = std::move(model);
    r.n = n;
    r.basis_size = basis_size;
    return r;
}

std::string format_row(const BenchRow& r) {
    std::ostringstream os;
    os << std::left << std::setw(16) << r.experiment << std::setw(13) << r.model << std::right << std::setw(7) << r.n
       << std::setw(7) << r.basis_size << std::scientific << std::setprecision(3) << std::setw(12) << r.train_seconds
       << std::setw(12) << r.mean_seconds_per_point << std::setw(12) << r.variance_seconds_per_point
       << std::fixed << std::setprecision(5) << std::setw(10) << r.test_error << std::setprecision(3) << std::setw(12)
       << r.lml;
    if (!r.note.empty()) os << "  " << r.note;
    return os.str();
}

Eigen::MatrixXd first_rows(const Eigen::MatrixXd& m, Eigen::Index limit) {
    return m.topRows(std::min(limit, m.rows()));
}

Hyperparameters sweep_initial(int n_scales) {
    Hyperparameters h;
    h.sigma = 0.1;
    h.sigma_p = 1.0;
    h.scales.h1 = 0.1;
    h.scales.beta = 0.5;
    h.scales.gamma = 0.5;
    h.scales.n_scales = n_scales;
    return h;
}

using PointFn = std::function<double(const Eigen::VectorXd&)>;

// Seconds per point for each predictor. Samples are taken round-robin and the
// fastest is kept, so a slow stretch on the host is shared by every entry
// instead of landing on one. Short sweeps are repeated to last about 20 ms.
std::vector<double> per_point_round_robin(const Eigen::MatrixXd& points, int reps, const std::vector<PointFn>& fns) {
    using clock = std::chrono::steady_clock;
    const Eigen::Index rows = std::max<Eigen::Index>(points.rows(), 1);
    volatile double sink = 0.0;
    auto timed = [&](const PointFn& fn, Eigen::Index sweeps) {
        const auto start = clock::now();
        double acc = 0.0;
        for (Eigen::Index s = 0; s < sweeps; ++s)
            for (Eigen::Index i = 0; i < points.rows(); ++i) acc += fn(Eigen::VectorXd(points.row(i).transpose()));
        sink = sink + acc;
        return std::chrono::duration<double>(clock::now() - start).count();
    };

    std::vector<Eigen::Index> sweeps;
    for (const auto& fn : fns) {
        const double once = timed(fn, 1);
        sweeps.push_back(static_cast<Eigen::Index>(std::clamp(std::ceil(0.02 / std::max(once, 1e-9)), 1.0, 1000.0)));
    }
    std::vector<double> best(fns.size(), std::numeric_limits<double>::infinity());
    for (int r = 0; r < std::max(reps, 1); ++r)
        for (std::size_t k = 0; k < fns.size(); ++k)
            best[k] = std::min(best[k], timed(fns[k], sweeps[k]) / static_cast<double>(rows * sweeps[k]));
    return best;
}

double per_point_seconds(const Eigen::MatrixXd& points, int reps, const PointFn& fn) {
    return per_point_round_robin(points, reps, {fn}).front();
}

}  // namespace

std::string BenchReport::table() const {
    std::ostringstream os;
    os << std::left << std::setw(16) << "experiment" << std::setw(13) << "model" << std::right << std::setw(7) << "N"
       << std::setw(7) << "D" << std::setw(12) << "train_s" << std::setw(12) << "mean_s/pt" << std::setw(12)
       << "var_s/pt" << std::setw(10) << "error" << std::setw(12) << "lml" << '\n';
    for (const auto& r : rows) os << format_row(r) << '\n';
    for (const auto& f : fits)
        os << "fit " << f.name << ": exponent " << std::fixed << std::setprecision(3) << f.fit.exponent << " (R^2 "
           << f.fit.r2 << ")\n";
    for (const auto& n : notes) os << n << '\n';
    return os.str();
}

std::string BenchReport::csv() const {
    std::ostringstream os;
    os.precision(10);
    os << "experiment,model,N,D,train_seconds,mean_seconds_per_point,variance_seconds_per_point,test_error,lml\n";
    for (const auto& r : rows)
        os << r.experiment << ',' << r.model << ',' << r.n << ',' << r.basis_size << ',' << r.train_seconds << ','
           << r.mean_seconds_per_point << ',' << r.variance_seconds_per_point << ',' << r.test_error << ',' << r.lml
           << '\n';
    for (const auto& f : fits) os << "# fit," << f.name << ',' << f.fit.exponent << ',' << f.fit.r2 << '\n';
    return os.str();
}

BenchReport bench_sweep(SyntheticKind kind, const BenchOptions& opts) {
    const std::string name = kind_name(kind);
    const auto sizes = opts.sizes.empty() ? std::vector<Eigen::Index>{128, 256, 512, 1024, 2048, 4096} : opts.sizes;
    BenchReport report;
    for (const auto n : sizes) {
        SyntheticSpec spec;
        spec.kind = kind;
        spec.n_points = n;
        spec.noise_sigma = opts.noise;
        spec.seed = opts.seed;
        const auto split = generate_split(spec);
        const auto [train, stats] = normalize(split.train);
        const Eigen::MatrixXd test_q = stats.apply_inputs(split.test.inputs);
        const Eigen::MatrixXd timing_q = first_rows(test_q, opts.max_test_points);

        auto restored = [&](auto&& mean_at) {
            Eigen::VectorXd out(test_q.rows());
            for (Eigen::Index i = 0; i < test_q.rows(); ++i)
                out(i) = stats.restore_target(mean_at(Eigen::VectorXd(test_q.row(i).transpose())));
            return out;
        };

        OptimizerConfig cfg = opts.optimizer;
        cfg.method = Method::D;
        if (opts.n_scales > 1 &&
            std::find(cfg.free_params.begin(), cfg.free_params.end(), Param::beta) == cfg.free_params.end())
            cfg.free_params.push_back(Param::beta);
        const auto opt = optimize(train, sweep_initial(opts.n_scales), cfg);
        const BasisSet basis = cluster_basis(train.inputs, opt.best_hyper.scales, opt.cluster_seed);

        MethodDModel md;
        BenchRow rd = make_row(name, "mgp-D", n, basis.size());
        rd.train_seconds = time_median([&] { md = train_d(train, basis, opt.best_hyper); }, opts.reps);
        rd.mean_seconds_per_point =
            per_point_seconds(timing_q, opts.reps, [&](const Eigen::VectorXd& q) { return predict_mean_d(md, q); });
        rd.variance_seconds_per_point =
            per_point_seconds(timing_q, opts.reps, [&](const Eigen::VectorXd& q) { return predict_d(md, q).variance; });
        rd.test_error = normalized_error(restored([&](const Eigen::VectorXd& q) { return predict_mean_d(md, q); }),
                                         split.test.targets);
        rd.lml = md.lml;
        std::ostringstream note;
        note << "sigma=" << opt.best_hyper.sigma * stats.y_range << " h1=" << opt.best_hyper.scales.h1
             << " gamma=" << opt.best_hyper.scales.gamma;
        rd.note = note.str();
        report.rows.push_back(rd);

        if (n > opts.full_gp_max_n) continue;

        MethodNModel mn;
        BenchRow rn = make_row(name, "mgp-N", n, basis.size());
        rn.train_seconds = time_median([&] { mn = train_n(train, basis, opt.best_hyper); }, opts.reps);
        rn.mean_seconds_per_point =
            per_point_seconds(timing_q, opts.reps, [&](const Eigen::VectorXd& q) { return predict_mean_n(mn, q); });
        rn.variance_seconds_per_point =
            per_point_seconds(timing_q, opts.reps, [&](const Eigen::VectorXd& q) { return predict_n(mn, q).variance; });
        rn.test_error = normalized_error(restored([&](const Eigen::VectorXd& q) { return predict_mean_n(mn, q); }),
                                         split.test.targets);
        rn.lml = mn.lml;
        report.rows.push_back(rn);

        StandardGpParams init;
        const auto sg_opt = optimize_standard_gp(train, init, cfg);
        StandardGpModel sg;
        BenchRow rs = make_row(name, "standard-gp", n, n);
        rs.train_seconds = time_median([&] { sg = train_standard_gp(train, sg_opt.best); }, opts.reps);
        rs.variance_seconds_per_point = per_point_seconds(
            timing_q, opts.reps, [&](const Eigen::VectorXd& q) { return predict_standard_gp(sg, q).variance; });
        rs.mean_seconds_per_point = rs.variance_seconds_per_point;
        rs.test_error = normalized_error(
            restored([&](const Eigen::VectorXd& q) { return predict_standard_gp(sg, q).mean; }), split.test.targets);
        rs.lml = sg.lml;
        std::ostringstream snote;
        snote << "sigma=" << sg_opt.best.sigma * stats.y_range << " width=" << sg_opt.best.width
              << " width/h1=" << sg_opt.best.width / opt.best_hyper.scales.h1;
        rs.note = snote.str();
        report.rows.push_back(rs);
    }
    return report;
}

BenchReport bench_nonuniform(const BenchOptions& opts) {
    SyntheticSpec spec;
    spec.kind = SyntheticKind::nonuniform_step;
    spec.n_points = opts.sizes.empty() ? 101 : opts.sizes.front();
    spec.noise_sigma = opts.noise;
    spec.seed = opts.seed;
    const auto [train, stats] = normalize(generate(spec));

    // Noiseless truth on a uniform grid over the input range.
    const Eigen::Index m = 1000;
    Eigen::MatrixXd grid(m, 1);
    Eigen::VectorXd truth(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        grid(i, 0) = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
        truth(i) = synthetic_truth(spec.kind, stats.x_min(0) + stats.x_range(0) * grid(i, 0));
    }

    BenchReport report;
    const int multi = opts.n_scales > 1 ? opts.n_scales : 6;
    for (const int s : {multi, 1}) {
        OptimizerConfig cfg = opts.optimizer;
        cfg.method = Method::D;
        cfg.free_params = {Param::sigma, Param::h1, Param::gamma};
        if (s > 1) cfg.free_params.push_back(Param::beta);
        Hyperparameters init = sweep_initial(s);
        const auto opt = optimize(train, init, cfg);
        const BasisSet basis = cluster_basis(train.inputs, opt.best_hyper.scales, opt.cluster_seed);
        MethodDModel md;
        BenchRow r = make_row("nonuniform-step", "mgp-D S=" + std::to_string(s), train.count(), basis.size());
        r.train_seconds = time_median([&] { md = train_d(train, basis, opt.best_hyper); }, opts.reps);
        Eigen::VectorXd pred(m);
        for (Eigen::Index i = 0; i < m; ++i)
            pred(i) = stats.restore_target(predict_mean_d(md, Eigen::VectorXd(grid.row(i).transpose())));
        r.test_error = normalized_error(pred, truth);
        r.lml = md.lml;
        std::ostringstream note;
        note << "sigma=" << opt.best_hyper.sigma * stats.y_range << " gamma=" << opt.best_hyper.scales.gamma
             << " h=[";
        for (int k = 1; k <= s; ++k) note << (k > 1 ? " " : "") << opt.best_hyper.scales.scale(k);
        note << "]";
        r.note = note.str();
        report.rows.push_back(r);
    }

    const auto sg_opt = optimize_standard_gp(train, StandardGpParams{}, opts.optimizer);
    const auto sg = train_standard_gp(train, sg_opt.best);
    BenchRow rs = make_row("nonuniform-step", "standard-gp", train.count(), train.count());
    Eigen::VectorXd pred(m);
    for (Eigen::Index i = 0; i < m; ++i)
        pred(i) = stats.restore_target(predict_standard_gp(sg, Eigen::VectorXd(grid.row(i).transpose())).mean);
    rs.test_error = normalized_error(pred, truth);
    rs.lml = sg.lml;
    rs.note = "width=" + std::to_string(sg_opt.best.width);
    report.rows.push_back(rs);
    report.notes.push_back("error is measured against the noiseless step on a 1000-point uniform grid");
    return report;
}

BenchReport bench_scaling(const BenchOptions& opts) {
    const auto sizes = opts.sizes.empty() ? std::vector<Eigen::Index>{512, 1024, 2048, 4096} : opts.sizes;
    const Eigen::Index D = opts.basis_size;

    Eigen::MatrixXd centers(D, 1);
    for (Eigen::Index j = 0; j < D; ++j) centers(j, 0) = (static_cast<double>(j) + 0.5) / static_cast<double>(D);
    const BasisSet basis(centers, Eigen::VectorXd::Constant(D, 1.5 / static_cast<double>(D)));
    Hyperparameters hyper;
    hyper.sigma = 0.1;
    hyper.sigma_p = 1.0;

    // One query set for the whole sweep so per-point timings differ only through N.
    const Eigen::MatrixXd timing_q =
        Eigen::VectorXd::LinSpaced(std::max<Eigen::Index>(opts.max_test_points, 1), 0.0, 1.0);

    BenchReport report;
    std::vector<double> ns, train_d_t, train_n_t;
    std::vector<MethodDModel> d_models;
    std::vector<MethodNModel> n_models;
    for (const auto n : sizes) {
        SyntheticSpec spec;
        spec.kind = SyntheticKind::varfreq_sine;
        spec.n_points = n;
        spec.noise_sigma = opts.noise;
        spec.seed = opts.seed;
        const Dataset train = generate(spec);

        MethodDModel md;
        MethodNModel mn;
        ns.push_back(static_cast<double>(n));
        train_d_t.push_back(time_median([&] { md = train_d(train, basis, hyper); }, opts.reps));
        train_n_t.push_back(time_median([&] { mn = train_n(train, basis, hyper); }, opts.reps));
        d_models.push_back(std::move(md));
        n_models.push_back(std::move(mn));
    }

    // Index layout: [mean D | mean N | variance D | variance N], one entry per size.
    std::vector<PointFn> fns;
    for (const auto& m : d_models) fns.push_back([&m](const Eigen::VectorXd& q) { return predict_mean_d(m, q); });
    for (const auto& m : n_models) fns.push_back([&m](const Eigen::VectorXd& q) { return predict_mean_n(m, q); });
    for (const auto& m : d_models) fns.push_back([&m](const Eigen::VectorXd& q) { return predict_d(m, q).variance; });
    for (const auto& m : n_models) fns.push_back([&m](const Eigen::VectorXd& q) { return predict_n(m, q).variance; });
    const std::vector<double> per_point = per_point_round_robin(timing_q, opts.reps, fns);

    const std::size_t count = sizes.size();
    auto slice = [&](std::size_t block) {
        return std::vector<double>(per_point.begin() + static_cast<std::ptrdiff_t>(block * count),
                                   per_point.begin() + static_cast<std::ptrdiff_t>((block + 1) * count));
    };
    const auto mean_d_t = slice(0), mean_n_t = slice(1), var_d_t = slice(2), var_n_t = slice(3);
    for (std::size_t k = 0; k < count; ++k) {
        BenchRow rd = make_row("scaling", "mgp-D", sizes[k], D);
        BenchRow rn = make_row("scaling", "mgp-N", sizes[k], D);
        rd.train_seconds = train_d_t[k];
        rn.train_seconds = train_n_t[k];
        rd.mean_seconds_per_point = mean_d_t[k];
        rn.mean_seconds_per_point = mean_n_t[k];
        rd.variance_seconds_per_point = var_d_t[k];
        rn.variance_seconds_per_point = var_n_t[k];
        rd.lml = d_models[k].lml;
        rn.lml = n_models[k].lml;
        rd.note = rn.note = "|lml_D - lml_N| = " + std::to_string(std::abs(rd.lml - rn.lml));
        report.rows.push_back(rd);
        report.rows.push_back(rn);
    }
    if (ns.size() >= 2) {
        report.fits.push_back({"train method D", fit_power_law(ns, train_d_t)});
        report.fits.push_back({"train method N", fit_power_law(ns, train_n_t)});
        report.fits.push_back({"mean/pt method D", fit_power_law(ns, mean_d_t)});
        report.fits.push_back({"mean/pt method N", fit_power_law(ns, mean_n_t)});
        report.fits.push_back({"var/pt method D", fit_power_law(ns, var_d_t)});
        report.fits.push_back({"var/pt method N", fit_power_law(ns, var_n_t)});
    }
    return report;
}

EquivalenceSummary equivalence_suite(std::uint64_t seed, Eigen::Index instances, const RandomInstanceLimits& limits) {
    EquivalenceSummary s;
    for (Eigen::Index i = 0; i < instances; ++i) {
        const auto inst = random_instance(derive_seed(seed, static_cast<std::uint64_t>(i)), limits);
        const auto md = train_d(inst.data, inst.basis, inst.hyper, JitterPolicy::none());
        const auto mn = train_n(inst.data, inst.basis, inst.hyper, JitterPolicy::none());
        for (Eigen::Index t = 0; t < inst.test_points.rows(); ++t) {
            const Eigen::VectorXd q = inst.test_points.row(t).transpose();
            const auto pd = predict_d(md, q);
            const auto pn = predict_n(mn, q);
            s.max_mean_rel = std::max(s.max_mean_rel, std::abs(pd.mean - pn.mean) / (1.0 + std::abs(pn.mean)));
            s.max_variance_rel =
                std::max(s.max_variance_rel, std::abs(pd.variance - pn.variance) / (1.0 + pn.variance));
        }
        s.max_lml_abs = std::max(s.max_lml_abs, std::abs(md.lml - mn.lml));
        if (inst.data.count() <= 512)
            s.max_logdet_identity = std::max(s.max_logdet_identity, logdet_identity_residual(inst.data, inst.basis, inst.hyper));
        ++s.instances;
    }
    return s;
}

BenchReport bench_equivalence(const BenchOptions& opts) {
    const auto s = equivalence_suite(opts.seed, opts.instances);
    BenchReport report;
    std::ostringstream os;
    os << std::scientific << std::setprecision(3) << "instances=" << s.instances
       << " max_mean_rel=" << s.max_mean_rel << " max_variance_rel=" << s.max_variance_rel
       << " max_lml_abs=" << s.max_lml_abs << " max_logdet_identity=" << s.max_logdet_identity;
    report.notes.push_back(os.str());
    return report;
}

}  // namespace mgp
