#include "mgp/clustering.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mgp {

namespace {

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index a, Eigen::Index b) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
        const double t = points(a, k) - points(b, k);
        s += t * t;
    }
    return s;
}

}  // namespace

void ScaleConfig::validate() const {
    if (!(h1 > 0.0) || !std::isfinite(h1)) throw std::invalid_argument("h1 must be a positive finite value");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (n_scales < 1) throw std::invalid_argument("number of scales must be >= 1");
}

double ScaleConfig::scale(int s) const { return h1 * std::pow(beta, s - 1); }

SingleScaleClusters cluster_single_scale(const Eigen::MatrixXd& points, std::span<const Eigen::Index> candidates,
                                         double radius, Rng& rng) {
    if (candidates.empty()) throw std::invalid_argument("cluster_single_scale: empty point set");
    if (!(radius > 0.0)) throw std::invalid_argument("cluster_single_scale: radius must be > 0");

    const double r2 = radius * radius;
    std::vector<Eigen::Index> remaining(candidates.begin(), candidates.end());
    SingleScaleClusters out;
    out.assignment.reserve(remaining.size());

    while (!remaining.empty()) {
        const auto pick = static_cast<std::size_t>(rng.index(remaining.size()));
        const Eigen::Index center = remaining[pick];
        const auto ordinal = static_cast<Eigen::Index>(out.centers.size());
        out.centers.push_back(center);

        // Stable compaction keeps the remaining order independent of which
        // points were absorbed, so the stream of picks is reproducible.
        std::size_t kept = 0;
        for (const Eigen::Index p : remaining) {
            if (p == center || squared_distance(points, p, center) <= r2) {
                out.assignment.emplace_back(p, ordinal);
            } else {
                remaining[kept++] = p;
            }
        }
        remaining.resize(kept);
    }
    return out;
}

ClusterResult cluster_multiscale(const Eigen::MatrixXd& points, const ScaleConfig& cfg, Rng& rng) {
    cfg.validate();
    if (points.rows() == 0) throw std::invalid_argument("cluster_multiscale: empty point set");

    ClusterResult result;
    result.per_scale_counts.assign(static_cast<std::size_t>(cfg.n_scales), 0);
    result.assignment.resize(static_cast<std::size_t>(cfg.n_scales));

    std::vector<Eigen::Index> remaining(static_cast<std::size_t>(points.rows()));
    std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});
    std::vector<char> is_center(static_cast<std::size_t>(points.rows()), 0);

    for (int s = 1; s <= cfg.n_scales && !remaining.empty(); ++s) {
        const auto level = cluster_single_scale(points, remaining, cfg.radius(s), rng);
        const auto offset = static_cast<Eigen::Index>(result.centers.size());
        for (const Eigen::Index c : level.centers) {
            result.centers.push_back({c, s});
            is_center[static_cast<std::size_t>(c)] = 1;
        }
        auto& assigned = result.assignment[static_cast<std::size_t>(s - 1)];
        assigned.reserve(level.assignment.size());
        for (const auto& [p, ord] : level.assignment) assigned.emplace_back(p, ord + offset);
        result.per_scale_counts[static_cast<std::size_t>(s - 1)] = static_cast<Eigen::Index>(level.centers.size());

        std::erase_if(remaining, [&](Eigen::Index p) { return is_center[static_cast<std::size_t>(p)] != 0; });
    }
    return result;
}

std::vector<ScaleCoverage> coverage_report(const Eigen::MatrixXd& points, const ClusterResult& result,
                                           const ScaleConfig& cfg) {
    std::vector<ScaleCoverage> report(static_cast<std::size_t>(cfg.n_scales));
    for (int s = 1; s <= cfg.n_scales; ++s) {
        auto& r = report[static_cast<std::size_t>(s - 1)];
        if (static_cast<std::size_t>(s - 1) < result.assignment.size()) {
            for (const auto& [p, ord] : result.assignment[static_cast<std::size_t>(s - 1)]) {
                const auto c = result.centers[static_cast<std::size_t>(ord)].row;
                r.max_center_distance = std::max(r.max_center_distance, std::sqrt(squared_distance(points, p, c)));
            }
        }
        double sep2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < result.centers.size(); ++i) {
            if (result.centers[i].scale != s) continue;
            for (std::size_t j = i + 1; j < result.centers.size(); ++j) {
                if (result.centers[j].scale != s) continue;
                sep2 = std::min(sep2, squared_distance(points, result.centers[i].row, result.centers[j].row));
            }
        }
        r.min_center_separation = std::sqrt(sep2);
    }
    return report;
}

double min_pairwise_distance(const Eigen::MatrixXd& points) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = i + 1; j < points.rows(); ++j) best = std::min(best, squared_distance(points, i, j));
    return std::sqrt(best);
}

}  // namespace mgp
