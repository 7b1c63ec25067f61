#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ggnam/additive.hpp"
#include "ggnam/data.hpp"

namespace ggnam {

struct SearchOptions {
    FitOptions fit;
    int workers = 0;  // 0 -> default_worker_count()

    /// Fresh initializations per training job; the best-validation one wins.
    /// Seeds derive from the job seed, so results stay deterministic.
    int restarts = 1;

    /// Stopping / grouping gaps on the reported metric (AUC or RMSE);
    /// NaN picks the task default.
    double epsilon_select = std::numeric_limits<double>::quiet_NaN();
    double epsilon_group = std::numeric_limits<double>::quiet_NaN();

    double resolved_epsilon_select(TaskKind task) const;
    double resolved_epsilon_group(TaskKind task) const;
    int resolved_workers() const;
};

struct SelectionStep {
    int promoted = 0;  // 1-based feature index
    double val_loss = 0.0;
    double val_metric = 0.0;
};

struct SelectionTrace {
    double lalr_loss = 0.0, lalr_metric = 0.0;
    double fcnn_loss = 0.0, fcnn_metric = 0.0;
    double epsilon = 0.0;
    std::vector<SelectionStep> steps;
    std::string stop_reason;
};

struct SelectionResult {
    std::vector<int> linear;     // U, ascending
    std::vector<int> nonlinear;  // V in promotion order
    SelectionTrace trace;
};

/// Forward stepwise promotion of features from the linear set into one
/// jointly-nonlinear group, until the gap to the full FCNN closes.
SelectionResult forward_stepwise_select(const TabularDataset& train,
                                        const TabularDataset& validation,
                                        TaskKind task, double epsilon,
                                        const SearchOptions& options,
                                        std::uint64_t seed);

struct SeparabilityMatrix {
    std::vector<int> features;  // the nonlinear set V, ascending
    Eigen::MatrixXd A;          // validation accuracies, symmetric
    double epsilon = 0.0;

    std::string to_csv() const;
};

/// Eq.-style separability test: diagonal holds the accuracy of the joint
/// model over V; entry (i,j) the accuracy with V split into overlapping
/// groups V\{i} and V\{j}. Linear features stay in the model throughout.
SeparabilityMatrix separability_matrix(const TabularDataset& train,
                                       const TabularDataset& validation,
                                       TaskKind task,
                                       const std::vector<int>& linear,
                                       const std::vector<int>& nonlinear,
                                       const SearchOptions& options,
                                       std::uint64_t seed);

/// Connected components of the interaction graph with an edge wherever the
/// separated model loses at least epsilon of accuracy.
std::vector<std::vector<int>> group_nonlinear(const SeparabilityMatrix& A,
                                              double epsilon);

using StageObserver =
    std::function<void(const std::string& stage, const std::string& payload_json)>;

struct PipelineResult {
    SelectionResult selection;
    std::optional<SeparabilityMatrix> separability;
    std::vector<std::vector<int>> groups;  // final nonlinear groups
    GgnamModel model;
    TrainHistory history;
    std::map<std::string, double> metrics;
    std::string architecture_report;
};

/// Full architecture discovery: baselines, forward selection, separability
/// test, grouping, final model.
PipelineResult fit_ggnam_pipeline(const TabularDataset& train,
                                  const TabularDataset& validation,
                                  const TabularDataset& test, TaskKind task,
                                  const Scaler& scaler,
                                  const SearchOptions& options,
                                  std::uint64_t seed,
                                  const StageObserver& observer = {});

std::string selection_trace_to_json(const SelectionTrace& trace);

/// Architecture table in the style the run reports use
/// (Model | Linear | Individual nonlinear | Nonlinear groups).
std::string architecture_report(int p, const std::vector<int>& linear,
                                const std::vector<std::vector<int>>& groups);

}  // namespace ggnam
