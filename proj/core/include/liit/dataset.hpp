#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace liit {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowIndex = std::size_t;

/// Row-major real feature matrix with dense class ids 0..K-1.
///
/// Datasets produced by load_csv and make_blobs satisfy validate(); partitions
/// produced by subset() may lack some classes (a small validation split, say)
/// but keep the parent's class count and names so ids stay comparable.
struct TabularDataset {
    Matrix features;
    std::vector<int> labels;
    std::string name;
    int num_classes = 0;
    /// Original label text, indexed by class id.
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }

    /// Full invariant check: n >= K >= 2, every class present, finite features.
    void validate() const;

    /// Row indices of each class, ascending.
    [[nodiscard]] std::vector<std::vector<RowIndex>> rows_by_class() const;
};

/// Copy of the given rows (duplicates kept, order preserved).
TabularDataset subset(const TabularDataset& ds, std::span<const RowIndex> rows);

struct SplitDataset {
    TabularDataset train;
    TabularDataset validation;
    TabularDataset test;
    /// Source-row indices of each partition, ascending.
    std::vector<RowIndex> train_rows;
    std::vector<RowIndex> validation_rows;
    std::vector<RowIndex> test_rows;
    std::uint64_t split_seed = 0;
    std::vector<std::string> warnings;
};

struct TrainStats {
    Vector mean;
    /// Population variance (divide by n).
    Vector variance;
};

/// Label column selector: a header name or a zero-based column index.
/// Negative indices count from the right (-1 is the last column).
using LabelColumn = std::variant<std::string, int>;

TabularDataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column,
                        bool has_header);

/// Parses CSV text; `source` is used in error messages only.
TabularDataset parse_csv(std::string_view text, const LabelColumn& label_column, bool has_header,
                         std::string source = "<memory>");

/// Writes features followed by the label (as its original class name) in the last column.
void write_csv(const TabularDataset& ds, const std::filesystem::path& path);

/// Stratified 80/10/10 split, deterministic in (ds, seed).
SplitDataset split(const TabularDataset& ds, std::uint64_t seed);

TrainStats train_stats(const TabularDataset& ds);
TrainStats train_stats(const Matrix& features);

/// K Gaussian clusters with standard deviation `spread` around distinct means.
TabularDataset make_blobs(std::size_t n, std::size_t dims, int num_classes, double spread,
                          std::uint64_t seed);

/// Class means used by make_blobs; exposed for oracles.
Matrix blob_centers(std::size_t dims, int num_classes);

}  // namespace liit
