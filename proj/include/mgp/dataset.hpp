#ifndef MGP_DATASET_HPP
#define MGP_DATASET_HPP

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>

namespace mgp {

/// Raised for malformed input files; the message carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + ", line " + std::to_string(line)), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Raised when a file cannot be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// N samples in R^d: one input row per sample plus a scalar target.
struct Dataset {
    Eigen::MatrixXd inputs;   // N x d
    Eigen::VectorXd targets;  // N

    Dataset() = default;
    Dataset(Eigen::MatrixXd q, Eigen::VectorXd y);

    Eigen::Index count() const noexcept { return inputs.rows(); }
    Eigen::Index dim() const noexcept { return inputs.cols(); }
};

/// Per-column affine maps onto [0, 1]. A zero range marks a constant column.
struct NormalizationStats {
    Eigen::VectorXd x_min;
    Eigen::VectorXd x_range;
    double y_min = 0.0;
    double y_range = 1.0;

    /// Identity map for d input columns.
    static NormalizationStats identity(Eigen::Index dim);

    Eigen::MatrixXd apply_inputs(const Eigen::MatrixXd& q) const;
    Eigen::VectorXd apply_point(const Eigen::VectorXd& q) const;
    Eigen::VectorXd apply_targets(const Eigen::VectorXd& y) const;
    double restore_target(double y) const noexcept;
    double restore_variance(double v) const noexcept { return v * y_range * y_range; }
};

/// Writes through a sibling temp file and renames it into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

Dataset load_csv(const std::filesystem::path& path);
/// Rectangular numeric CSV with '#' comments; an empty file yields a 0 x 0 matrix.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
/// Writes "q_1,...,q_d,y" rows with 17 significant digits.
void write_csv(const std::filesystem::path& path, const Dataset& data);
std::string to_csv(const Dataset& data);

std::pair<Dataset, NormalizationStats> normalize(const Dataset& data);
Dataset denormalize(const Dataset& data, const NormalizationStats& stats);

enum class SyntheticKind { step, nonuniform_step, varfreq_sine };

SyntheticKind parse_kind(const std::string& name);
std::string kind_name(SyntheticKind kind);

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::step;
    Eigen::Index n_points = 128;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    double h_t = 0.1;
};

/// Size of the uniform grid that step and sine samples are drawn from.
inline constexpr Eigen::Index kSyntheticGridSize = 10000;

/// Noiseless target function for a synthetic kind.
double synthetic_truth(SyntheticKind kind, double q);

/// Training set drawn per the synthetic spec.
Dataset generate(const SyntheticSpec& spec);

/// Training set plus the grid points that were not drawn (empty test set for
/// nonuniform_step, which has no sampling pool).
struct SyntheticSplit {
    Dataset train;
    Dataset test;
};
SyntheticSplit generate_split(const SyntheticSpec& spec);

/// ||truth - pred|| / ||truth||.
double normalized_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth);

}  // namespace mgp

#endif  // MGP_DATASET_HPP
