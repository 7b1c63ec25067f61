#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ggnam/errors.hpp"

namespace ggnam {

enum class TaskKind { regression, binary_classification };

std::string to_string(TaskKind t);
TaskKind task_from_string(const std::string& s);

/// Rows x features matrix plus target; missing cells are NaN until imputed.
struct TabularDataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> feature_names;
    TaskKind task = TaskKind::binary_classification;
    std::vector<std::string> provenance;

    int rows() const { return static_cast<int>(X.rows()); }
    int features() const { return static_cast<int>(X.cols()); }
    bool has_missing() const;
    TabularDataset subset(const std::vector<int>& row_indices) const;
};

struct SplitSpec {
    double test_fraction = 0.2;
    double validation_fraction_of_train = 0.2;
    std::uint64_t seed = 0;
};

struct SplitIndices {
    std::vector<int> train, validation, test;
};

/// Per-feature standardization statistics from the training split.
struct Scaler {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;  // 1.0 substituted for constant columns
    std::vector<bool> constant;
    Eigen::VectorXd median;  // training medians, shape-function reference

    Eigen::VectorXd transform(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd inverse(const Eigen::VectorXd& z) const;
    bool empty() const { return mean.size() == 0; }
};

/// Flat key=value dataset description (path, target, task, sentinels, ...).
struct DatasetManifest {
    std::string name;
    std::string path;
    std::string target_column;
    TaskKind task = TaskKind::binary_classification;
    std::vector<std::string> missing_sentinels = {"", "NA", "?"};
    std::vector<std::string> drop_columns;
    double correlation_threshold = 0.0;  // 0 disables pruning
};

DatasetManifest load_manifest(const std::string& path);

TabularDataset load_csv(const std::string& path, const std::string& target_column,
                        TaskKind task,
                        const std::vector<std::string>& missing_sentinels = {"", "NA", "?"},
                        const std::vector<std::string>& drop_columns = {});

/// Replace NaN cells with column means computed over train_rows only.
/// Returns the number of imputed cells.
int impute_means(TabularDataset& dataset, const std::vector<int>& train_rows);

/// Greedy pruning in column order: drop a column whose |Pearson r| with any
/// retained earlier column exceeds the threshold (computed on train_rows).
/// Returns names of removed features.
std::vector<std::string> prune_correlated(TabularDataset& dataset,
                                          double threshold,
                                          const std::vector<int>& train_rows);

SplitIndices split_indices(int rows, const SplitSpec& spec);

struct Splits {
    TabularDataset train, validation, test;
    SplitIndices indices;
};

Splits split(const TabularDataset& dataset, const SplitSpec& spec);

/// Fit the scaler on train and transform all three splits in place.
Scaler standardize(TabularDataset& train, TabularDataset& validation,
                   TabularDataset& test);

/// load -> split -> impute -> prune -> standardize, leakage-free.
struct PreparedData {
    Splits splits;
    Scaler scaler;
    std::vector<std::string> pruned_features;
    int imputed_cells = 0;
};

PreparedData prepare(const DatasetManifest& manifest, const SplitSpec& spec);

}  // namespace ggnam
