#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "ggnam/data.hpp"
#include "ggnam/nn.hpp"

namespace ggnam {

/// Feature partition: linear indices U plus nonlinear groups V. Indices are
/// 1-based, matching the architecture tables the reports print.
struct PartitionSpec {
    int p = 0;
    std::vector<int> linear;
    std::vector<std::vector<int>> groups;
    bool allow_overlap = false;
};

PartitionSpec make_partition(int p, std::vector<int> linear,
                             std::vector<std::vector<int>> groups,
                             bool allow_overlap = false);

enum class PresetKind { lalr, fcnn, nam };

PresetKind preset_from_string(const std::string& s);

PartitionSpec preset_partition(PresetKind kind, int p);

enum class LinkKind { identity, logistic };

LinkKind link_for_task(TaskKind task);
LossSpec loss_for_task(TaskKind task);

struct Contributions {
    double intercept = 0.0;
    std::vector<double> linear_terms;  // aligned with partition.linear
    std::vector<double> group_terms;   // aligned with partition.groups
    double total() const;
};

struct Prediction {
    double pre_link = 0.0;
    double post_link = 0.0;
};

/// Additive model: intercept + linear terms + one subnet per nonlinear
/// group, behind an identity or logistic link. Stores the fit-time scaler
/// and standardizes raw inputs itself.
class GgnamModel {
  public:
    GgnamModel() = default;
    GgnamModel(PartitionSpec partition, LinkKind link,
               const std::vector<int>& subnet_hidden, Activation activation,
               double l2_lambda, std::uint64_t seed);

    const PartitionSpec& partition() const { return partition_; }
    LinkKind link() const { return link_; }
    double alpha() const { return alpha_; }
    const Eigen::VectorXd& beta() const { return beta_; }
    const std::vector<DenseNet>& subnets() const { return subnets_; }
    const Scaler& scaler() const { return scaler_; }
    void set_scaler(Scaler s) { scaler_ = std::move(s); }

    std::size_t param_count() const;
    Eigen::VectorXd params() const;
    void set_params(const Eigen::VectorXd& flat);

    /// Pre-link scores over an already standardized batch (training path).
    Eigen::VectorXd score_batch(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd grad(const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& dscore) const;
    double penalty() const;

    /// Raw-unit input; applies the stored scaler before scoring.
    Prediction predict(const Eigen::VectorXd& x_raw) const;
    Eigen::VectorXd predict_batch(const Eigen::MatrixXd& X_raw) const;

    Contributions contributions(const Eigen::VectorXd& x_raw) const;

    friend GgnamModel model_from_json(const std::string& text);
    friend std::string model_to_json(const GgnamModel& model);

  private:
    Eigen::VectorXd standardize_row(const Eigen::VectorXd& x_raw) const;

    PartitionSpec partition_;
    LinkKind link_ = LinkKind::identity;
    double alpha_ = 0.0;
    Eigen::VectorXd beta_;
    std::vector<DenseNet> subnets_;
    Scaler scaler_;
};

double apply_link(LinkKind link, double pre_link);

struct FitOptions {
    std::vector<int> subnet_hidden;  // defaults chosen per task when empty
    Activation activation = Activation::logistic;
    double l2_lambda = 0.0;
    AdamConfig optimizer;
    TrainSchedule schedule;
    bool defaults_applied = false;

    static FitOptions defaults_for(TaskKind task);
};

struct FitResult {
    GgnamModel model;
    TrainHistory history;
};

/// Joint training of intercept, linear weights and subnets over already
/// standardized splits. The scaler is embedded so the model serves raw rows.
FitResult fit(const PartitionSpec& partition, const TabularDataset& train,
              const TabularDataset& validation, TaskKind task,
              const FitOptions& options, const Scaler& scaler,
              std::uint64_t seed);

/// Shape of one additive term over a raw-unit grid, zeroed at the grid
/// point closest to the training median. `index` is a 1-based feature index
/// for linear terms / singleton groups; for multi-feature groups pass the
/// group position via group_shape below.
std::vector<double> shape_function(const GgnamModel& model, int feature_index,
                                   const std::vector<double>& grid);

/// Mesh evaluation for a (possibly multi-feature) group: one grid per
/// member feature, values enumerated row-major over the cartesian product.
std::vector<double> group_shape(const GgnamModel& model, int group_position,
                                const std::vector<std::vector<double>>& grids);

std::string model_to_json(const GgnamModel& model);
GgnamModel model_from_json(const std::string& text);

/// "x2-x5, x7-x23" style compression of a 1-based index list.
std::string format_feature_ranges(std::vector<int> indices);

}  // namespace ggnam
