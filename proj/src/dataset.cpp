#include "mgp/dataset.hpp"

#include "mgp/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string_view>
#include <vector>

namespace mgp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_double(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd q, Eigen::VectorXd y) : inputs(std::move(q)), targets(std::move(y)) {
    if (inputs.rows() != targets.size())
        throw std::invalid_argument("dataset: input rows and target count differ");
    if (!inputs.allFinite() || !targets.allFinite())
        throw std::invalid_argument("dataset: non-finite value");
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot rename into " + path.string());
    }
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<double> values;
    std::size_t width = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;

        std::size_t fields = 0;
        std::string_view rest = body;
        while (true) {
            const auto comma = rest.find(',');
            const auto field = rest.substr(0, comma);
            double v = 0.0;
            if (!parse_double(field, v)) throw ParseError("non-numeric field", line_no);
            if (!std::isfinite(v)) throw ParseError("non-finite field", line_no);
            values.push_back(v);
            ++fields;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (width == 0) {
            width = fields;
        } else if (fields != width) {
            throw ParseError("ragged row: expected " + std::to_string(width) + " fields, got " +
                                 std::to_string(fields),
                             line_no);
        }
        ++rows;
    }
    if (in.bad()) throw IoError("read failed: " + path.string());

    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(width));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = values[static_cast<std::size_t>(i * m.cols() + j)];
    return m;
}

Dataset load_csv(const std::filesystem::path& path) {
    const Eigen::MatrixXd m = load_matrix_csv(path);
    if (m.rows() == 0) throw ParseError("empty file", 1);
    if (m.cols() < 2) throw ParseError("expected at least one input and one target column", 1);
    const auto d = m.cols() - 1;
    return Dataset(m.leftCols(d), m.col(d));
}

std::string to_csv(const Dataset& data) {
    std::ostringstream os;
    os.precision(17);
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        for (Eigen::Index j = 0; j < data.dim(); ++j) os << data.inputs(i, j) << ',';
        os << data.targets(i) << '\n';
    }
    return os.str();
}

void write_csv(const std::filesystem::path& path, const Dataset& data) { write_text_atomic(path, to_csv(data)); }

NormalizationStats NormalizationStats::identity(Eigen::Index dim) {
    NormalizationStats s;
    s.x_min = Eigen::VectorXd::Zero(dim);
    s.x_range = Eigen::VectorXd::Ones(dim);
    return s;
}

namespace {
double scale(double v, double lo, double range) { return range > 0.0 ? (v - lo) / range : 0.0; }
}  // namespace

Eigen::MatrixXd NormalizationStats::apply_inputs(const Eigen::MatrixXd& q) const {
    Eigen::MatrixXd out(q.rows(), q.cols());
    for (Eigen::Index j = 0; j < q.cols(); ++j)
        for (Eigen::Index i = 0; i < q.rows(); ++i) out(i, j) = scale(q(i, j), x_min(j), x_range(j));
    return out;
}

Eigen::VectorXd NormalizationStats::apply_point(const Eigen::VectorXd& q) const {
    Eigen::VectorXd out(q.size());
    for (Eigen::Index j = 0; j < q.size(); ++j) out(j) = scale(q(j), x_min(j), x_range(j));
    return out;
}

Eigen::VectorXd NormalizationStats::apply_targets(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) out(i) = scale(y(i), y_min, y_range);
    return out;
}

double NormalizationStats::restore_target(double y) const noexcept { return y_min + y_range * y; }

std::pair<Dataset, NormalizationStats> normalize(const Dataset& data) {
    NormalizationStats s;
    const auto d = data.dim();
    s.x_min.resize(d);
    s.x_range.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        if (data.count() == 0) {
            s.x_min(j) = 0.0;
            s.x_range(j) = 0.0;
            continue;
        }
        s.x_min(j) = data.inputs.col(j).minCoeff();
        s.x_range(j) = data.inputs.col(j).maxCoeff() - s.x_min(j);
    }
    if (data.count() > 0) {
        s.y_min = data.targets.minCoeff();
        s.y_range = data.targets.maxCoeff() - s.y_min;
    } else {
        s.y_min = 0.0;
        s.y_range = 0.0;
    }
    return {Dataset(s.apply_inputs(data.inputs), s.apply_targets(data.targets)), s};
}

Dataset denormalize(const Dataset& data, const NormalizationStats& s) {
    Eigen::MatrixXd q(data.count(), data.dim());
    for (Eigen::Index j = 0; j < data.dim(); ++j)
        q.col(j) = (data.inputs.col(j).array() * s.x_range(j) + s.x_min(j)).matrix();
    Eigen::VectorXd y = (data.targets.array() * s.y_range + s.y_min).matrix();
    return Dataset(std::move(q), std::move(y));
}

SyntheticKind parse_kind(const std::string& name) {
    if (name == "step") return SyntheticKind::step;
    if (name == "nonuniform_step" || name == "nonuniform-step") return SyntheticKind::nonuniform_step;
    if (name == "varfreq_sine" || name == "sine") return SyntheticKind::varfreq_sine;
    throw std::invalid_argument("unknown synthetic kind: " + name);
}

std::string kind_name(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::step: return "step";
        case SyntheticKind::nonuniform_step: return "nonuniform_step";
        case SyntheticKind::varfreq_sine: return "varfreq_sine";
    }
    return "?";
}

double synthetic_truth(SyntheticKind kind, double q) {
    switch (kind) {
        case SyntheticKind::step:
        case SyntheticKind::nonuniform_step: return q > 0.5 ? 1.0 : 0.0;
        case SyntheticKind::varfreq_sine:
            return std::sin(2.0 * std::numbers::pi * q * std::pow(4.0 * q + 1.0, 1.5));
    }
    return 0.0;
}

namespace {

void validate(const SyntheticSpec& spec) {
    if (spec.n_points < 2) throw std::invalid_argument("n_points must be >= 2");
    if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be >= 0");
    if (spec.kind == SyntheticKind::nonuniform_step && !(spec.h_t > 0.0))
        throw std::invalid_argument("h_t must be > 0");
    if (spec.kind != SyntheticKind::nonuniform_step && spec.n_points > kSyntheticGridSize)
        throw std::invalid_argument("n_points exceeds the " + std::to_string(kSyntheticGridSize) +
                                    "-point sampling grid");
}

// Points q = 0.5 -/+ h_t ln z for z on a regular grid over [exp(-0.5/h_t), 1].
// Odd n shares the z = 1 node between the branches; even n keeps both copies.
Dataset nonuniform_step(const SyntheticSpec& spec, Rng& rng) {
    const Eigen::Index n = spec.n_points;
    const bool odd = n % 2 == 1;
    const Eigen::Index nodes = odd ? (n + 1) / 2 : n / 2;
    const double z_min = std::exp(-0.5 / spec.h_t);

    std::vector<double> q;
    q.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < nodes; ++k) {
        const double z = nodes == 1 ? 1.0 : z_min + (1.0 - z_min) * static_cast<double>(k) / (nodes - 1);
        q.push_back(0.5 + spec.h_t * std::log(z));
    }
    const Eigen::Index mirrored = odd ? nodes - 1 : nodes;
    for (Eigen::Index k = mirrored - 1; k >= 0; --k) q.push_back(1.0 - q[static_cast<std::size_t>(k)]);

    Eigen::MatrixXd inputs(n, 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        inputs(i, 0) = q[static_cast<std::size_t>(i)];
        y(i) = synthetic_truth(spec.kind, inputs(i, 0)) + spec.noise_sigma * rng.normal();
    }
    return Dataset(std::move(inputs), std::move(y));
}

}  // namespace

SyntheticSplit generate_split(const SyntheticSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    if (spec.kind == SyntheticKind::nonuniform_step) return {nonuniform_step(spec, rng), Dataset()};

    const Eigen::Index g = kSyntheticGridSize;
    // Noise is drawn for the whole grid first, so a point's observed value does
    // not depend on how many points are sampled.
    Eigen::VectorXd grid_y(g);
    for (Eigen::Index i = 0; i < g; ++i) {
        const double q = static_cast<double>(i) / (g - 1);
        grid_y(i) = synthetic_truth(spec.kind, q) + spec.noise_sigma * rng.normal();
    }

    // Partial Fisher-Yates draw without replacement.
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(g));
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < spec.n_points; ++i) {
        const auto j = i + static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(g - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    auto mid = pool.begin() + spec.n_points;
    std::sort(pool.begin(), mid);
    std::sort(mid, pool.end());

    auto gather = [&](auto first, auto last) {
        const auto n = static_cast<Eigen::Index>(std::distance(first, last));
        Eigen::MatrixXd q(n, 1);
        Eigen::VectorXd y(n);
        Eigen::Index r = 0;
        for (auto it = first; it != last; ++it, ++r) {
            q(r, 0) = static_cast<double>(*it) / (g - 1);
            y(r) = grid_y(*it);
        }
        return Dataset(std::move(q), std::move(y));
    };
    return {gather(pool.begin(), mid), gather(mid, pool.end())};
}

Dataset generate(const SyntheticSpec& spec) { return generate_split(spec).train; }

double normalized_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("normalized_error: length mismatch");
    const double denom = truth.norm();
    if (!(denom > 0.0)) throw std::invalid_argument("normalized_error: truth vector has zero norm");
    return (truth - pred).norm() / denom;
}

}  // namespace mgp
