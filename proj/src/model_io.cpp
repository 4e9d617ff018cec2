#include "mgp/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mgp {

namespace {

class Writer {
public:
    Writer() { os_.precision(17); }

    template <class T>
    void field(const char* key, const T& v) {
        os_ << key << ' ' << v << '\n';
    }
    void vector_line(const char* key, const Eigen::VectorXd& v) {
        os_ << key;
        for (Eigen::Index i = 0; i < v.size(); ++i) os_ << ' ' << v(i);
        os_ << '\n';
    }
    void column(const char* key, const Eigen::VectorXd& v) {
        os_ << key << '\n';
        for (Eigen::Index i = 0; i < v.size(); ++i) os_ << v(i) << '\n';
    }
    void lower(const char* key, const Eigen::MatrixXd& l) {
        os_ << key << '\n';
        for (Eigen::Index i = 0; i < l.rows(); ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) os_ << (j ? " " : "") << l(i, j);
            os_ << '\n';
        }
    }
    void rows(const char* key, const Eigen::MatrixXd& m) {
        os_ << key << '\n';
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) os_ << (j ? " " : "") << m(i, j);
            os_ << '\n';
        }
    }
    std::ostringstream& stream() { return os_; }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

void write_common(Writer& w, char method, const BasisSet& basis, const Hyperparameters& h,
                  const NormalizationStats& norm, Eigen::Index train_count, double lml, double jitter) {
    w.field("mgp-model", kModelFormatVersion);
    w.field("method", method);
    w.field("dim", basis.dim());
    w.field("train_count", train_count);
    w.field("basis_count", basis.size());
    w.field("scales", h.scales.n_scales);
    w.field("sigma", h.sigma);
    w.field("sigma_p", h.sigma_p);
    w.field("h1", h.scales.h1);
    w.field("beta", h.scales.beta);
    w.field("gamma", h.scales.gamma);
    w.field("lml", lml);
    w.field("jitter", jitter);
    w.vector_line("norm_x_min", norm.x_min);
    w.vector_line("norm_x_range", norm.x_range);
    w.stream() << "norm_y " << norm.y_min << ' ' << norm.y_range << '\n';
    w.stream() << "centers\n";
    for (Eigen::Index j = 0; j < basis.size(); ++j) {
        const int level = basis.levels.empty() ? 0 : basis.levels[static_cast<std::size_t>(j)];
        w.stream() << level << ' ' << basis.scales(j);
        for (Eigen::Index k = 0; k < basis.dim(); ++k) w.stream() << ' ' << basis.centers(j, k);
        w.stream() << '\n';
    }
}

/// Line-oriented reader that skips blank and '#' lines and tracks line numbers.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::vector<std::string> tokens() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            std::istringstream ls(line);
            std::vector<std::string> out;
            std::string t;
            while (ls >> t) out.push_back(t);
            if (out.empty() || out.front().front() == '#') continue;
            return out;
        }
        fail("unexpected end of model file");
    }

    std::vector<std::string> keyed(const std::string& key, std::size_t values) {
        auto t = tokens();
        if (t.front() != key) fail("expected '" + key + "', found '" + t.front() + "'");
        if (t.size() != values + 1) fail("'" + key + "' expects " + std::to_string(values) + " value(s)");
        t.erase(t.begin());
        return t;
    }

    double real(const std::string& s) {
        double v = 0.0;
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end) fail("invalid number '" + s + "'");
        return v;
    }

    long long integer(const std::string& s) {
        long long v = 0;
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end) fail("invalid integer '" + s + "'");
        return v;
    }

    double real_field(const std::string& key) { return real(keyed(key, 1)[0]); }
    long long int_field(const std::string& key) { return integer(keyed(key, 1)[0]); }

    Eigen::VectorXd vector_line(const std::string& key, Eigen::Index n) {
        const auto t = keyed(key, static_cast<std::size_t>(n));
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = real(t[static_cast<std::size_t>(i)]);
        return v;
    }

    Eigen::VectorXd column(const std::string& key, Eigen::Index n) {
        keyed(key, 0);
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto t = tokens();
            if (t.size() != 1) fail("expected one value per line in '" + key + "'");
            v(i) = real(t[0]);
        }
        return v;
    }

    Eigen::MatrixXd lower(const std::string& key, Eigen::Index n) {
        keyed(key, 0);
        Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto t = tokens();
            if (static_cast<Eigen::Index>(t.size()) != i + 1) fail("row " + std::to_string(i) + " of '" + key + "' has the wrong length");
            for (Eigen::Index j = 0; j <= i; ++j) l(i, j) = real(t[static_cast<std::size_t>(j)]);
        }
        return l;
    }

    Eigen::MatrixXd rows(const std::string& key, Eigen::Index n, Eigen::Index d) {
        keyed(key, 0);
        Eigen::MatrixXd m(n, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto t = tokens();
            if (static_cast<Eigen::Index>(t.size()) != d) fail("row " + std::to_string(i) + " of '" + key + "' has the wrong length");
            for (Eigen::Index j = 0; j < d; ++j) m(i, j) = real(t[static_cast<std::size_t>(j)]);
        }
        return m;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError("model file: " + what, line_); }

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

}  // namespace

std::string serialize_model(const AnyModel& model) {
    Writer w;
    if (const auto* m = std::get_if<MethodDModel>(&model)) {
        write_common(w, 'D', m->basis, m->hyper, m->norm, m->train_count, m->lml, m->chol_precision.jitter());
        w.column("weights", m->weights);
        w.lower("chol", m->chol_precision.lower());
    } else {
        const auto& n = std::get<MethodNModel>(model);
        write_common(w, 'N', n.basis, n.hyper, n.norm, n.training_inputs.rows(), n.lml, n.chol_cov.jitter());
        w.column("alpha", n.alpha);
        w.lower("chol", n.chol_cov.lower());
        w.rows("inputs", n.training_inputs);
    }
    return w.str();
}

AnyModel parse_model(std::istream& in) {
    Reader r(in);
    if (const auto version = r.int_field("mgp-model"); version != kModelFormatVersion)
        r.fail("unsupported format version " + std::to_string(version));
    const auto method = r.keyed("method", 1)[0];
    if (method != "D" && method != "N") r.fail("unknown method '" + method + "'");
    const auto d = static_cast<Eigen::Index>(r.int_field("dim"));
    const auto n = static_cast<Eigen::Index>(r.int_field("train_count"));
    const auto D = static_cast<Eigen::Index>(r.int_field("basis_count"));
    if (d < 1 || n < 1 || D < 1) r.fail("dimensions must be positive");

    Hyperparameters h;
    h.scales.n_scales = static_cast<int>(r.int_field("scales"));
    h.sigma = r.real_field("sigma");
    h.sigma_p = r.real_field("sigma_p");
    h.scales.h1 = r.real_field("h1");
    h.scales.beta = r.real_field("beta");
    h.scales.gamma = r.real_field("gamma");
    const double lml = r.real_field("lml");
    const double jitter = r.real_field("jitter");

    NormalizationStats norm;
    norm.x_min = r.vector_line("norm_x_min", d);
    norm.x_range = r.vector_line("norm_x_range", d);
    const auto ny = r.keyed("norm_y", 2);
    norm.y_min = r.real(ny[0]);
    norm.y_range = r.real(ny[1]);

    r.keyed("centers", 0);
    Eigen::MatrixXd centers(D, d);
    Eigen::VectorXd scales(D);
    std::vector<int> levels(static_cast<std::size_t>(D));
    bool has_levels = true;
    for (Eigen::Index j = 0; j < D; ++j) {
        const auto t = r.tokens();
        if (static_cast<Eigen::Index>(t.size()) != d + 2) r.fail("center row has the wrong length");
        levels[static_cast<std::size_t>(j)] = static_cast<int>(r.integer(t[0]));
        has_levels = has_levels && levels[static_cast<std::size_t>(j)] > 0;
        scales(j) = r.real(t[1]);
        for (Eigen::Index k = 0; k < d; ++k) centers(j, k) = r.real(t[static_cast<std::size_t>(k + 2)]);
    }

    try {
        h.validate();
        BasisSet basis(std::move(centers), std::move(scales));
        if (has_levels) basis.levels = std::move(levels);

        if (method == "D") {
            MethodDModel m;
            m.weights = r.column("weights", D);
            m.chol_precision = CholeskyFactor(r.lower("chol", D), jitter);
            m.basis = std::move(basis);
            m.hyper = h;
            m.norm = std::move(norm);
            m.lml = lml;
            m.train_count = n;
            return m;
        }
        MethodNModel m;
        m.alpha = r.column("alpha", n);
        m.chol_cov = CholeskyFactor(r.lower("chol", n), jitter);
        m.training_inputs = r.rows("inputs", n, d);
        m.design = design_matrix(m.training_inputs, basis);
        m.basis = std::move(basis);
        m.hyper = h;
        m.norm = std::move(norm);
        m.lml = lml;
        return m;
    } catch (const ParseError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
}

void save_model(const std::filesystem::path& path, const AnyModel& model) {
    write_text_atomic(path, serialize_model(model));
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_model(in);
}

}  // namespace mgp
