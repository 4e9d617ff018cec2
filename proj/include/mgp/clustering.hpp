#ifndef MGP_CLUSTERING_HPP
#define MGP_CLUSTERING_HPP

#include "mgp/rng.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace mgp {

/// Geometric ladder of basis scales h_s = h1 * beta^(s-1), s = 1..n_scales,
/// with cluster radius gamma * h_s at each level.
struct ScaleConfig {
    double h1 = 0.1;
    double beta = 0.5;
    int n_scales = 1;
    double gamma = 0.5;

    /// Throws std::invalid_argument unless h1 > 0, beta and gamma in (0,1), n_scales >= 1.
    void validate() const;
    /// Scale of level s (1-based).
    double scale(int s) const;
    double radius(int s) const { return gamma * scale(s); }
};

/// One center of the greedy covering at one scale.
struct SingleScaleClusters {
    std::vector<Eigen::Index> centers;  // point row indices, in selection order
    /// (point row index, center ordinal) for every candidate point, in absorption order.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> assignment;
};

/// Greedy covering: pick a random remaining point as a center, absorb every
/// remaining point within `radius` (inclusive), repeat until nothing remains.
///
/// `points` holds one point per row; `candidates` selects the rows taking part.
/// Throws std::invalid_argument on an empty candidate set or radius <= 0.
SingleScaleClusters cluster_single_scale(const Eigen::MatrixXd& points, std::span<const Eigen::Index> candidates,
                                         double radius, Rng& rng);

struct ClusterCenter {
    Eigen::Index row = 0;  // source row in the training set
    int scale = 1;         // 1-based scale level
};

struct ClusterResult {
    std::vector<ClusterCenter> centers;  // grouped by scale, coarsest first
    std::vector<Eigen::Index> per_scale_counts;
    /// assignment[s-1] maps each point absorbed at level s to the index of its
    /// center in `centers`.
    std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> assignment;

    Eigen::Index total() const noexcept { return static_cast<Eigen::Index>(centers.size()); }
};

/// Runs the single-scale covering once per level on the shrinking remaining
/// set. Only the chosen centers are removed between levels; non-center points
/// stay candidates for finer levels and are dropped after the last one.
ClusterResult cluster_multiscale(const Eigen::MatrixXd& points, const ScaleConfig& cfg, Rng& rng);

struct ScaleCoverage {
    double max_center_distance = 0.0;  // over points absorbed at this level
    double min_center_separation = 0.0;  // +inf with fewer than two centers
};

std::vector<ScaleCoverage> coverage_report(const Eigen::MatrixXd& points, const ClusterResult& result,
                                           const ScaleConfig& cfg);

/// Smallest Euclidean distance between distinct rows (+inf for fewer than two rows).
double min_pairwise_distance(const Eigen::MatrixXd& points);

}  // namespace mgp

#endif  // MGP_CLUSTERING_HPP
