#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ggnam/errors.hpp"

namespace ggnam {

enum class Activation { logistic, relu, identity };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Layer layout of a scalar-output dense network. hidden_widths may be
/// empty, in which case the net is a single affine map.
struct LayerSpec {
    int input_width = 0;
    std::vector<int> hidden_widths;
    Activation activation = Activation::logistic;
    int output_width = 1;

    void validate() const;
    std::size_t param_count() const;
    /// Widths including input and output, e.g. [23, 5, 1].
    std::vector<int> widths() const;
};

enum class LossKind { mse, binary_cross_entropy };

struct LossSpec {
    LossKind kind = LossKind::mse;
};

/// Mean loss over the batch. Scores are pre-link; binary cross entropy
/// applies the logistic link internally (numerically stable form).
double loss_value(const LossSpec& loss, const Eigen::VectorXd& scores,
                  const Eigen::VectorXd& targets);

/// d(mean loss)/d(score_k), one entry per sample.
Eigen::VectorXd loss_dscore(const LossSpec& loss, const Eigen::VectorXd& scores,
                            const Eigen::VectorXd& targets);

/// Per-layer activations kept from a forward pass, consumed by backward().
struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;   // pre-activations, one per layer
    std::vector<Eigen::MatrixXd> post;  // post[0] is the input batch
};

/// Dense feedforward net with scalar output and an optional L2 penalty on
/// weights (biases are not penalized).
class DenseNet {
  public:
    DenseNet() = default;
    DenseNet(LayerSpec spec, double l2_lambda, std::uint64_t seed);
    DenseNet(LayerSpec spec, std::vector<Eigen::MatrixXd> weights,
             std::vector<Eigen::VectorXd> biases, double l2_lambda);

    const LayerSpec& spec() const { return spec_; }
    double l2_lambda() const { return l2_lambda_; }
    const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& biases() const { return biases_; }
    std::vector<Eigen::MatrixXd>& mutable_weights() { return weights_; }

    std::size_t param_count() const { return spec_.param_count(); }
    Eigen::VectorXd params() const;
    void set_params(const Eigen::VectorXd& flat);

    double forward(const Eigen::VectorXd& x) const;
    /// Batch forward; rows of X are samples. Fills cache when given.
    Eigen::VectorXd score_batch(const Eigen::MatrixXd& X,
                                ForwardCache* cache = nullptr) const;

    /// Gradient of sum_k dscore[k] * f(x_k) plus, when with_l2, the
    /// derivative of l2_lambda * sum(w^2). Flat layout matches params().
    Eigen::VectorXd backward(const ForwardCache& cache,
                             const Eigen::VectorXd& dscore,
                             bool with_l2 = true) const;

    /// Gradient of the full objective (mean loss + penalty); trainer hook.
    Eigen::VectorXd grad(const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& dscore) const;
    double penalty() const;

    bool all_finite() const;

  private:
    LayerSpec spec_;
    std::vector<Eigen::MatrixXd> weights_;  // fan_in x fan_out
    std::vector<Eigen::VectorXd> biases_;
    double l2_lambda_ = 0.0;
};

DenseNet init_network(const LayerSpec& spec, double l2_lambda, std::uint64_t seed);

/// Gradient of mean loss + L2 penalty with respect to every parameter.
Eigen::VectorXd backprop(const DenseNet& net, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& y, const LossSpec& loss);

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

class AdamState {
  public:
    explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}
    const AdamConfig& config() const { return cfg_; }
    long step_count() const { return t_; }
    void update(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  private:
    AdamConfig cfg_;
    Eigen::VectorXd m_, v_;
    long t_ = 0;
};

struct TrainSchedule {
    int max_epochs = 500;
    int patience = 25;
    int batch_size = 128;
    std::uint64_t seed = 0;
};

struct TrainHistory {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    int best_epoch = -1;
    double best_val_loss = 0.0;
};

namespace detail {
std::vector<int> shuffled_indices(int n, std::uint64_t seed, int epoch);
}

/// Mini-batch Adam loop with early stopping on validation loss; the model
/// is left holding the best-epoch parameters. Model must provide params(),
/// set_params(), score_batch(), grad() and penalty().
template <class Model>
TrainHistory train_model(Model& model, const Eigen::MatrixXd& Xtr,
                         const Eigen::VectorXd& ytr, const Eigen::MatrixXd& Xval,
                         const Eigen::VectorXd& yval, const LossSpec& loss,
                         const AdamConfig& opt, const TrainSchedule& schedule) {
    if (Xtr.rows() == 0 || Xval.rows() == 0)
        throw InvalidInputError("train_model: empty train or validation set");

    TrainHistory history;
    AdamState adam(opt);
    Eigen::VectorXd params = model.params();
    Eigen::VectorXd best_params = params;
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = -1;
    int since_best = 0;
    const int n = static_cast<int>(Xtr.rows());
    const int bs = std::min(schedule.batch_size, n);

    for (int epoch = 0; epoch < schedule.max_epochs; ++epoch) {
        auto order = detail::shuffled_indices(n, schedule.seed, epoch);
        for (int start = 0; start < n; start += bs) {
            const int len = std::min(bs, n - start);
            Eigen::MatrixXd Xb(len, Xtr.cols());
            Eigen::VectorXd yb(len);
            for (int k = 0; k < len; ++k) {
                Xb.row(k) = Xtr.row(order[start + k]);
                yb(k) = ytr(order[start + k]);
            }
            Eigen::VectorXd scores = model.score_batch(Xb);
            Eigen::VectorXd dscore = loss_dscore(loss, scores, yb);
            Eigen::VectorXd g = model.grad(Xb, dscore);
            adam.update(params, g);
            model.set_params(params);
        }
        const double tr_loss =
            loss_value(loss, model.score_batch(Xtr), ytr) + model.penalty();
        const double va_loss = loss_value(loss, model.score_batch(Xval), yval);
        if (!std::isfinite(tr_loss) || !std::isfinite(va_loss))
            throw TrainingDivergedError(
                "training diverged at epoch " + std::to_string(epoch), epoch);
        history.train_loss.push_back(tr_loss);
        history.val_loss.push_back(va_loss);
        if (va_loss < best_val) {
            best_val = va_loss;
            best_params = params;
            best_epoch = epoch;
            since_best = 0;
        } else if (++since_best > schedule.patience) {
            break;
        }
    }
    if (best_epoch >= 0) model.set_params(best_params);
    history.best_epoch = best_epoch;
    history.best_val_loss = best_val;
    return history;
}

/// Max relative disagreement between analytic gradients and central finite
/// differences of the full objective, over all parameters.
template <class Model>
double gradient_check(Model& model, const Eigen::MatrixXd& X,
                      const Eigen::VectorXd& y, const LossSpec& loss, double h) {
    Eigen::VectorXd params = model.params();
    Eigen::VectorXd scores = model.score_batch(X);
    Eigen::VectorXd analytic = model.grad(X, loss_dscore(loss, scores, y));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        Eigen::VectorXd p = params;
        p(i) = params(i) + h;
        model.set_params(p);
        const double up = loss_value(loss, model.score_batch(X), y) + model.penalty();
        p(i) = params(i) - h;
        model.set_params(p);
        const double down = loss_value(loss, model.score_batch(X), y) + model.penalty();
        const double numeric = (up - down) / (2.0 * h);
        const double rel = std::abs(analytic(i) - numeric) /
                           (std::abs(analytic(i)) + std::abs(numeric) + 1e-12);
        worst = std::max(worst, rel);
    }
    model.set_params(params);
    return worst;
}

/// nn_core front door: train a DenseNet in place, returning the history.
TrainHistory train_epochs(DenseNet& net, const Eigen::MatrixXd& Xtr,
                          const Eigen::VectorXd& ytr, const Eigen::MatrixXd& Xval,
                          const Eigen::VectorXd& yval, const LossSpec& loss,
                          const AdamConfig& opt, const TrainSchedule& schedule);

std::string net_to_json(const DenseNet& net);
DenseNet net_from_json(const std::string& text);

}  // namespace ggnam
