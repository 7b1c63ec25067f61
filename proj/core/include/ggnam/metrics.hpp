#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ggnam/data.hpp"
#include "ggnam/errors.hpp"

namespace ggnam {

/// Rank-based (Mann-Whitney) AUC; ties contribute 1/2. Requires both classes.
double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

double rmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

/// Uniform "higher is better" validation score: AUC for classification,
/// negative RMSE for regression.
double accuracy_metric(TaskKind task, const Eigen::VectorXd& scores,
                       const Eigen::VectorXd& targets);

struct HessianMatrix {
    Eigen::MatrixXd H;
    double step = 0.0;
};

/// RMS over samples of mixed second partials of the scalar model function,
/// by central finite differences (4-point stencil off-diagonal, 3-point on
/// the diagonal).
HessianMatrix integrated_hessian(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::MatrixXd& rows, double h);

struct JmpMatrix {
    Eigen::MatrixXd probabilities;  // entries in [0,1] or exactly -0.1
    Eigen::MatrixXi counts;
    std::vector<double> edges_i, edges_j;  // interior bin edges
    static constexpr double kSentinel = -0.1;
};

/// Empirical positive rate per 2-D bin box of two features. Bins are
/// equal-population deciles by default; equal-width with the flag.
JmpMatrix joint_marginal_matrix(const TabularDataset& dataset, int feature_i,
                                int feature_j, int bins = 10, int min_count = 30,
                                bool equal_width = false);

}  // namespace ggnam
