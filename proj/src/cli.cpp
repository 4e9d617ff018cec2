#include "mgp/cli.hpp"

#include "mgp/bench.hpp"
#include "mgp/clustering.hpp"
#include "mgp/dataset.hpp"
#include "mgp/hyperopt.hpp"
#include "mgp/model_io.hpp"
#include "mgp/regression.hpp"
#include "mgp/rng.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mgp {

namespace {

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty() || path == "-")
        out << content;
    else
        write_text_atomic(path, content);
}

Method parse_method(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    if (s == "D") return Method::D;
    if (s == "N") return Method::N;
    throw std::invalid_argument("method must be D or N, got '" + s + "'");
}

struct GenerateArgs {
    std::string kind = "step";
    long long n = 128;
    double noise = 0.01;
    std::uint64_t seed = 0;
    double h_t = 0.1;
    std::string out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    SyntheticSpec spec;
    spec.kind = parse_kind(a.kind);
    spec.n_points = static_cast<Eigen::Index>(a.n);
    spec.noise_sigma = a.noise;
    spec.seed = a.seed;
    spec.h_t = a.h_t;
    emit(a.out, to_csv(generate(spec)), out);
    return kExitOk;
}

struct ClusterArgs {
    std::string input;
    double h1 = 0.1;
    double beta = 0.5;
    int scales = 1;
    double gamma = 0.5;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
    const Dataset data = load_csv(a.input);
    ScaleConfig cfg{a.h1, a.beta, a.scales, a.gamma};
    cfg.validate();
    const auto [norm_data, stats] = normalize(data);
    Rng rng(a.seed);
    const ClusterResult result = cluster_multiscale(norm_data.inputs, cfg, rng);

    std::ostringstream csv;
    csv.precision(17);
    for (const auto& c : result.centers) {
        for (Eigen::Index k = 0; k < data.dim(); ++k) csv << data.inputs(c.row, k) << ',';
        csv << c.scale << ',' << c.row << '\n';
    }
    emit(a.out, csv.str(), out);
    if (!a.out.empty() && a.out != "-") {
        out << "D " << result.total() << '\n';
        for (std::size_t s = 0; s < result.per_scale_counts.size(); ++s)
            out << "k_" << s + 1 << ' ' << result.per_scale_counts[s] << '\n';
    }
    return kExitOk;
}

struct TrainArgs {
    std::string input;
    std::string method = "D";
    int scales = 1;
    double h1 = 0.1;
    double beta = 0.5;
    double gamma = 0.5;
    double sigma = 0.1;
    double sigma_p = 1.0;
    bool optimize = false;
    bool optimize_sigma_p = false;
    std::uint64_t seed = 0;
    int starts = 3;
    int restarts = 0;
    int max_iters = 500;
    double f_tol = 1e-6;
    double x_tol = 1e-6;
    std::string out;
};

std::string train_report(const AnyModel& model, const NormalizationStats& stats, const OptimizationReport* opt) {
    const auto& basis = std::visit([](const auto& m) -> const BasisSet& { return m.basis; }, model);
    const auto& hyper = std::visit([](const auto& m) -> const Hyperparameters& { return m.hyper; }, model);
    const double lml = std::visit([](const auto& m) { return m.lml; }, model);
    const bool is_d = std::holds_alternative<MethodDModel>(model);
    const double jitter = is_d ? std::get<MethodDModel>(model).chol_precision.jitter()
                               : std::get<MethodNModel>(model).chol_cov.jitter();
    const Eigen::Index n =
        is_d ? std::get<MethodDModel>(model).train_count : std::get<MethodNModel>(model).training_inputs.rows();

    std::ostringstream os;
    os.precision(10);
    os << "method " << (is_d ? 'D' : 'N') << '\n';
    os << "N " << n << '\n';
    os << "D " << basis.size() << '\n';
    for (int s = 1; s <= hyper.scales.n_scales; ++s)
        os << "k_" << s << ' ' << std::count(basis.levels.begin(), basis.levels.end(), s) << '\n';
    os << "lml " << lml << '\n';
    os << "jitter " << jitter << '\n';
    os << "sigma " << hyper.sigma << " (data units " << hyper.sigma * stats.y_range << ")\n";
    os << "sigma_p " << hyper.sigma_p << '\n';
    os << "h1 " << hyper.scales.h1 << '\n';
    os << "beta " << hyper.scales.beta << '\n';
    os << "gamma " << hyper.scales.gamma << '\n';
    if (opt) {
        os << "iterations " << opt->iterations << '\n';
        os << "evaluations " << opt->evaluations << '\n';
        os << "termination " << termination_name(opt->reason) << '\n';
    }
    return os.str();
}

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const Method method = parse_method(a.method);
    const Dataset raw = load_csv(a.input);
    const auto [data, stats] = normalize(raw);

    Hyperparameters hyper;
    hyper.sigma = a.sigma;
    hyper.sigma_p = a.sigma_p;
    hyper.scales = ScaleConfig{a.h1, a.beta, a.scales, a.gamma};
    hyper.validate();

    std::uint64_t cluster_seed = derive_seed(a.seed, 0);
    OptimizationReport report;
    if (a.optimize) {
        OptimizerConfig cfg;
        cfg.max_iters = a.max_iters;
        cfg.f_tol = a.f_tol;
        cfg.x_tol = a.x_tol;
        cfg.seed = a.seed;
        cfg.starts = a.starts;
        cfg.restarts = a.restarts;
        cfg.method = method;
        if (a.scales > 1) cfg.free_params.push_back(Param::beta);
        if (a.optimize_sigma_p) cfg.free_params.push_back(Param::sigma_p);
        report = optimize(data, hyper, cfg);
        hyper = report.best_hyper;
        cluster_seed = report.cluster_seed;
    }

    const BasisSet basis = cluster_basis(data.inputs, hyper.scales, cluster_seed);
    AnyModel model;
    if (method == Method::D) {
        MethodDModel m = train_d(data, basis, hyper);
        m.norm = stats;
        model = std::move(m);
    } else {
        MethodNModel m = train_n(data, basis, hyper);
        m.norm = stats;
        model = std::move(m);
    }

    const std::string text = train_report(model, stats, a.optimize ? &report : nullptr);
    out << text;
    if (!a.out.empty()) {
        std::string commented;
        std::istringstream lines(text);
        for (std::string line; std::getline(lines, line);) commented += "# " + line + '\n';
        write_text_atomic(a.out, commented + serialize_model(model));
    }
    return kExitOk;
}

struct PredictArgs {
    std::string model;
    std::string input;
    std::string out;
    bool with_variance = false;
};

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
    const AnyModel model = load_model(a.model);
    const Eigen::MatrixXd table = load_matrix_csv(a.input);
    if (table.rows() == 0) {
        emit(a.out, "", out);
        return kExitOk;
    }
    const auto& norm = std::visit([](const auto& m) -> const NormalizationStats& { return m.norm; }, model);
    const Eigen::Index d = norm.x_min.size();
    if (table.cols() != d && table.cols() != d + 1) {
        err << "error: model expects " << d << " input column(s), input has " << table.cols() << '\n';
        return kExitUsage;
    }
    const Eigen::MatrixXd raw = table.leftCols(d);
    const Eigen::MatrixXd q = norm.apply_inputs(raw);
    const auto preds = std::visit([&](const auto& m) { return predict_batch(m, q); }, model);

    std::ostringstream csv;
    csv.precision(17);
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        for (Eigen::Index k = 0; k < d; ++k) csv << raw(i, k) << ',';
        const auto& p = preds[static_cast<std::size_t>(i)];
        csv << norm.restore_target(p.mean);
        if (a.with_variance) csv << ',' << norm.restore_variance(p.variance);
        csv << '\n';
    }
    emit(a.out, csv.str(), out);
    return kExitOk;
}

struct BenchArgs {
    std::string experiment = "step";
    std::vector<long long> sizes;
    double noise = -1.0;
    std::uint64_t seed = 1;
    int reps = 5;
    int scales = 0;
    long long basis_size = 32;
    long long instances = 100;
    long long max_test_points = 2000;
    long long full_gp_max_n = 1024;
    int starts = 3;
    std::string csv;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    BenchOptions opts;
    for (const auto n : a.sizes) opts.sizes.push_back(static_cast<Eigen::Index>(n));
    opts.seed = a.seed;
    opts.reps = a.reps;
    opts.basis_size = static_cast<Eigen::Index>(a.basis_size);
    opts.instances = static_cast<Eigen::Index>(a.instances);
    opts.max_test_points = static_cast<Eigen::Index>(a.max_test_points);
    opts.full_gp_max_n = static_cast<Eigen::Index>(a.full_gp_max_n);
    opts.optimizer.seed = a.seed;
    opts.optimizer.starts = a.starts;

    BenchReport report;
    if (a.experiment == "step" || a.experiment == "sine") {
        opts.noise = a.noise >= 0.0 ? a.noise : 0.01;
        opts.n_scales = a.scales > 0 ? a.scales : 1;
        report = bench_sweep(a.experiment == "step" ? SyntheticKind::step : SyntheticKind::varfreq_sine, opts);
    } else if (a.experiment == "nonuniform-step") {
        opts.noise = a.noise >= 0.0 ? a.noise : 0.03;
        opts.n_scales = a.scales > 0 ? a.scales : 6;
        report = bench_nonuniform(opts);
    } else if (a.experiment == "scaling") {
        opts.noise = a.noise >= 0.0 ? a.noise : 0.01;
        report = bench_scaling(opts);
    } else if (a.experiment == "equivalence") {
        report = bench_equivalence(opts);
    } else {
        throw std::invalid_argument("unknown experiment '" + a.experiment + "'");
    }
    out << report.table();
    write_text_atomic(a.csv.empty() ? "bench_" + a.experiment + ".csv" : a.csv, report.csv());
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multiscale sparse Gaussian process regression"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
    g->add_option("--kind", gen.kind, "step | nonuniform-step | varfreq-sine")->capture_default_str();
    g->add_option("--n", gen.n, "Number of samples")->capture_default_str();
    g->add_option("--noise", gen.noise, "Noise standard deviation")->capture_default_str();
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--h-t", gen.h_t, "Node spacing parameter of nonuniform-step")->capture_default_str();
    g->add_option("--out", gen.out, "Output CSV (stdout when omitted)");

    ClusterArgs clu;
    auto* c = app.add_subcommand("cluster", "Multiscale clustering of the inputs of a CSV dataset");
    c->add_option("--input", clu.input)->required();
    c->add_option("--h1", clu.h1)->capture_default_str();
    c->add_option("--beta", clu.beta)->capture_default_str();
    c->add_option("--S", clu.scales, "Number of scales")->capture_default_str();
    c->add_option("--gamma", clu.gamma)->capture_default_str();
    c->add_option("--seed", clu.seed)->capture_default_str();
    c->add_option("--out", clu.out, "Centers CSV: coordinates, scale index, source row");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Fit a model and save it");
    t->add_option("--input", tr.input)->required();
    t->add_option("--method", tr.method, "D (weight space) or N (function space)")->capture_default_str();
    t->add_option("--S", tr.scales, "Number of scales")->capture_default_str();
    t->add_option("--h1", tr.h1)->capture_default_str();
    t->add_option("--beta", tr.beta)->capture_default_str();
    t->add_option("--gamma", tr.gamma)->capture_default_str();
    t->add_option("--sigma", tr.sigma)->capture_default_str();
    t->add_option("--sigma-p", tr.sigma_p)->capture_default_str();
    t->add_flag("--optimize", tr.optimize, "Maximize the marginal likelihood first");
    t->add_flag("--optimize-sigma-p", tr.optimize_sigma_p, "Also optimize sigma_p");
    t->add_option("--seed", tr.seed)->capture_default_str();
    t->add_option("--starts", tr.starts)->capture_default_str();
    t->add_option("--restarts", tr.restarts)->capture_default_str();
    t->add_option("--max-iters", tr.max_iters)->capture_default_str();
    t->add_option("--f-tol", tr.f_tol)->capture_default_str();
    t->add_option("--x-tol", tr.x_tol)->capture_default_str();
    t->add_option("--out", tr.out, "Model file");

    PredictArgs pr;
    auto* p = app.add_subcommand("predict", "Predict with a saved model");
    p->add_option("--model", pr.model)->required();
    p->add_option("--input", pr.input, "CSV with d input columns (an extra target column is ignored)")->required();
    p->add_option("--out", pr.out, "Output CSV (stdout when omitted)");
    p->add_flag("--with-variance", pr.with_variance);

    BenchArgs be;
    auto* b = app.add_subcommand("bench", "Run a benchmark experiment");
    b->add_option("--experiment", be.experiment, "step | nonuniform-step | sine | scaling | equivalence")
        ->capture_default_str();
    b->add_option("--sizes", be.sizes, "Training set sizes");
    b->add_option("--noise", be.noise);
    b->add_option("--seed", be.seed)->capture_default_str();
    b->add_option("--reps", be.reps, "Timing repetitions")->capture_default_str();
    b->add_option("--S", be.scales, "Number of scales");
    b->add_option("--basis-size", be.basis_size, "D for the scaling experiment")->capture_default_str();
    b->add_option("--instances", be.instances)->capture_default_str();
    b->add_option("--max-test-points", be.max_test_points)->capture_default_str();
    b->add_option("--full-gp-max-n", be.full_gp_max_n)->capture_default_str();
    b->add_option("--starts", be.starts)->capture_default_str();
    b->add_option("--csv", be.csv, "CSV output (default bench_<experiment>.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*g) return cmd_generate(gen, out);
        if (*c) return cmd_cluster(clu, out);
        if (*t) return cmd_train(tr, out);
        if (*p) return cmd_predict(pr, out, err);
        return cmd_bench(be, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NotPositiveDefinite& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace mgp
