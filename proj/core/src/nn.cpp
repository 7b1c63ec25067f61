#include "ggnam/nn.hpp"

#include <nlohmann/json.hpp>
#include <random>

namespace ggnam {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::logistic: return "logistic";
        case Activation::relu: return "relu";
        case Activation::identity: return "identity";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "logistic") return Activation::logistic;
    if (s == "relu") return Activation::relu;
    if (s == "identity") return Activation::identity;
    throw InvalidSpecError("unknown activation: " + s);
}

void LayerSpec::validate() const {
    if (input_width <= 0)
        throw InvalidSpecError("LayerSpec: input_width must be positive");
    if (output_width <= 0)
        throw InvalidSpecError("LayerSpec: output_width must be positive");
    for (int w : hidden_widths)
        if (w <= 0) throw InvalidSpecError("LayerSpec: zero-width hidden layer");
}

std::vector<int> LayerSpec::widths() const {
    std::vector<int> w;
    w.push_back(input_width);
    w.insert(w.end(), hidden_widths.begin(), hidden_widths.end());
    w.push_back(output_width);
    return w;
}

std::size_t LayerSpec::param_count() const {
    const auto w = widths();
    std::size_t total = 0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        total += static_cast<std::size_t>(w[i]) * w[i + 1] + w[i + 1];
    return total;
}

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation a) {
    switch (a) {
        case Activation::logistic:
            return z.unaryExpr([](double v) { return sigmoid(v); });
        case Activation::relu:
            return z.cwiseMax(0.0);
        case Activation::identity:
            return z;
    }
    return z;
}

// derivative expressed from pre-activation and post-activation values
Eigen::MatrixXd activation_deriv(const Eigen::MatrixXd& pre,
                                 const Eigen::MatrixXd& post, Activation a) {
    switch (a) {
        case Activation::logistic:
            return post.array() * (1.0 - post.array());
        case Activation::relu:
            return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
        case Activation::identity:
            return Eigen::MatrixXd::Ones(pre.rows(), pre.cols());
    }
    return pre;
}

}  // namespace

double loss_value(const LossSpec& loss, const Eigen::VectorXd& scores,
                  const Eigen::VectorXd& targets) {
    if (scores.size() != targets.size() || scores.size() == 0)
        throw InvalidInputError("loss_value: empty or mismatched batch");
    const double n = static_cast<double>(scores.size());
    if (loss.kind == LossKind::mse) return (scores - targets).squaredNorm() / n;
    // bce over pre-link scores: mean(softplus(s) - y*s), stable for large |s|
    double total = 0.0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const double s = scores(i);
        const double softplus = s > 0 ? s + std::log1p(std::exp(-s))
                                      : std::log1p(std::exp(s));
        total += softplus - targets(i) * s;
    }
    return total / n;
}

Eigen::VectorXd loss_dscore(const LossSpec& loss, const Eigen::VectorXd& scores,
                            const Eigen::VectorXd& targets) {
    if (scores.size() != targets.size() || scores.size() == 0)
        throw InvalidInputError("loss_dscore: empty or mismatched batch");
    const double n = static_cast<double>(scores.size());
    if (loss.kind == LossKind::mse) return 2.0 * (scores - targets) / n;
    Eigen::VectorXd d(scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i)
        d(i) = (sigmoid(scores(i)) - targets(i)) / n;
    return d;
}

DenseNet::DenseNet(LayerSpec spec, double l2_lambda, std::uint64_t seed)
    : spec_(std::move(spec)), l2_lambda_(l2_lambda) {
    spec_.validate();
    if (l2_lambda_ < 0) throw InvalidSpecError("negative l2_lambda");
    std::mt19937_64 rng(seed);
    const auto w = spec_.widths();
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        const double limit = std::sqrt(6.0 / (w[i] + w[i + 1]));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Eigen::MatrixXd W(w[i], w[i + 1]);
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = dist(rng);
        weights_.push_back(std::move(W));
        biases_.push_back(Eigen::VectorXd::Zero(w[i + 1]));
    }
}

DenseNet::DenseNet(LayerSpec spec, std::vector<Eigen::MatrixXd> weights,
                   std::vector<Eigen::VectorXd> biases, double l2_lambda)
    : spec_(std::move(spec)),
      weights_(std::move(weights)),
      biases_(std::move(biases)),
      l2_lambda_(l2_lambda) {
    spec_.validate();
    const auto w = spec_.widths();
    if (weights_.size() != w.size() - 1 || biases_.size() != w.size() - 1)
        throw ShapeError("DenseNet: layer count mismatch");
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (weights_[i].rows() != w[i] || weights_[i].cols() != w[i + 1] ||
            biases_[i].size() != w[i + 1])
            throw ShapeError("DenseNet: weight/bias shape mismatch at layer " +
                             std::to_string(i));
    }
}

DenseNet init_network(const LayerSpec& spec, double l2_lambda, std::uint64_t seed) {
    return DenseNet(spec, l2_lambda, seed);
}

Eigen::VectorXd DenseNet::params() const {
    Eigen::VectorXd flat(param_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const auto& W = weights_[l];
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) flat(at++) = W(r, c);
        for (Eigen::Index i = 0; i < biases_[l].size(); ++i)
            flat(at++) = biases_[l](i);
    }
    return flat;
}

void DenseNet::set_params(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != param_count())
        throw ShapeError("set_params: flat size mismatch");
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        auto& W = weights_[l];
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = flat(at++);
        for (Eigen::Index i = 0; i < biases_[l].size(); ++i)
            biases_[l](i) = flat(at++);
    }
}

Eigen::VectorXd DenseNet::score_batch(const Eigen::MatrixXd& X,
                                      ForwardCache* cache) const {
    if (X.cols() != spec_.input_width)
        throw ShapeError("score_batch: expected " +
                         std::to_string(spec_.input_width) + " columns, got " +
                         std::to_string(X.cols()));
    Eigen::MatrixXd a = X;
    if (cache) {
        cache->pre.clear();
        cache->post.clear();
        cache->post.push_back(a);
    }
    const std::size_t last = weights_.size() - 1;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        Eigen::MatrixXd z =
            (a * weights_[l]).rowwise() + biases_[l].transpose();
        // output layer is always linear; the link lives outside the net
        a = (l == last) ? z : apply_activation(z, spec_.activation);
        if (cache) {
            cache->pre.push_back(z);
            cache->post.push_back(a);
        }
    }
    return a.col(0);
}

double DenseNet::forward(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd X = x.transpose();
    return score_batch(X)(0);
}

Eigen::VectorXd DenseNet::backward(const ForwardCache& cache,
                                   const Eigen::VectorXd& dscore,
                                   bool with_l2) const {
    const std::size_t L = weights_.size();
    // delta: d(objective)/d(pre-activation of layer l)
    Eigen::MatrixXd delta = dscore;  // n x 1, output layer is linear
    std::vector<Eigen::MatrixXd> gw(L);
    std::vector<Eigen::VectorXd> gb(L);
    for (std::size_t l = L; l-- > 0;) {
        gw[l] = cache.post[l].transpose() * delta;
        gb[l] = delta.colwise().sum().transpose();
        if (with_l2 && l2_lambda_ > 0) gw[l] += 2.0 * l2_lambda_ * weights_[l];
        if (l > 0) {
            Eigen::MatrixXd upstream = delta * weights_[l].transpose();
            delta = upstream.cwiseProduct(activation_deriv(
                cache.pre[l - 1], cache.post[l], spec_.activation));
        }
    }
    Eigen::VectorXd flat(param_count());
    Eigen::Index at = 0;
    for (std::size_t l = 0; l < L; ++l) {
        for (Eigen::Index r = 0; r < gw[l].rows(); ++r)
            for (Eigen::Index c = 0; c < gw[l].cols(); ++c) flat(at++) = gw[l](r, c);
        for (Eigen::Index i = 0; i < gb[l].size(); ++i) flat(at++) = gb[l](i);
    }
    return flat;
}

Eigen::VectorXd DenseNet::grad(const Eigen::MatrixXd& X,
                               const Eigen::VectorXd& dscore) const {
    ForwardCache cache;
    score_batch(X, &cache);
    return backward(cache, dscore, true);
}

double DenseNet::penalty() const {
    if (l2_lambda_ == 0) return 0.0;
    double ss = 0.0;
    for (const auto& W : weights_) ss += W.squaredNorm();
    return l2_lambda_ * ss;
}

bool DenseNet::all_finite() const {
    for (const auto& W : weights_)
        if (!W.allFinite()) return false;
    for (const auto& b : biases_)
        if (!b.allFinite()) return false;
    return true;
}

Eigen::VectorXd backprop(const DenseNet& net, const Eigen::MatrixXd& X,
                         const Eigen::VectorXd& y, const LossSpec& loss) {
    if (X.rows() == 0) throw InvalidInputError("backprop: empty batch");
    if (X.rows() != y.size()) throw ShapeError("backprop: batch size mismatch");
    ForwardCache cache;
    Eigen::VectorXd scores = net.score_batch(X, &cache);
    return net.backward(cache, loss_dscore(loss, scores, y), true);
}

void AdamState::update(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    if (m_.size() == 0) {
        m_ = Eigen::VectorXd::Zero(params.size());
        v_ = Eigen::VectorXd::Zero(params.size());
    }
    if (params.size() != grad.size() || params.size() != m_.size())
        throw ShapeError("AdamState: accumulator shape mismatch");
    ++t_;
    m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
    v_ = cfg_.beta2 * v_.array().matrix() +
         (1.0 - cfg_.beta2) * grad.array().square().matrix();
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    params.array() -= cfg_.learning_rate * (m_.array() / bc1) /
                      ((v_.array() / bc2).sqrt() + cfg_.eps);
}

namespace detail {
std::vector<int> shuffled_indices(int n, std::uint64_t seed, int epoch) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(epoch) + 1);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}
}  // namespace detail

TrainHistory train_epochs(DenseNet& net, const Eigen::MatrixXd& Xtr,
                          const Eigen::VectorXd& ytr, const Eigen::MatrixXd& Xval,
                          const Eigen::VectorXd& yval, const LossSpec& loss,
                          const AdamConfig& opt, const TrainSchedule& schedule) {
    return train_model(net, Xtr, ytr, Xval, yval, loss, opt, schedule);
}

std::string net_to_json(const DenseNet& net) {
    nlohmann::json j;
    j["input_width"] = net.spec().input_width;
    j["hidden_widths"] = net.spec().hidden_widths;
    j["activation"] = to_string(net.spec().activation);
    j["output_width"] = net.spec().output_width;
    j["l2_lambda"] = net.l2_lambda();
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < net.weights().size(); ++l) {
        const auto& W = net.weights()[l];
        std::vector<double> wflat;
        wflat.reserve(W.size());
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) wflat.push_back(W(r, c));
        std::vector<double> b(net.biases()[l].data(),
                              net.biases()[l].data() + net.biases()[l].size());
        layers.push_back({{"weights", wflat}, {"biases", b}});
    }
    j["layers"] = layers;
    return j.dump();
}

DenseNet net_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    LayerSpec spec;
    spec.input_width = j.at("input_width").get<int>();
    spec.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
    spec.activation = activation_from_string(j.at("activation").get<std::string>());
    spec.output_width = j.at("output_width").get<int>();
    const double l2 = j.at("l2_lambda").get<double>();
    const auto w = spec.widths();
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    const auto& layers = j.at("layers");
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        auto wflat = layers.at(l).at("weights").get<std::vector<double>>();
        auto bflat = layers.at(l).at("biases").get<std::vector<double>>();
        if (wflat.size() != static_cast<std::size_t>(w[l]) * w[l + 1] ||
            bflat.size() != static_cast<std::size_t>(w[l + 1]))
            throw ShapeError("net_from_json: layer " + std::to_string(l) +
                             " size mismatch");
        Eigen::MatrixXd W(w[l], w[l + 1]);
        std::size_t at = 0;
        for (Eigen::Index r = 0; r < W.rows(); ++r)
            for (Eigen::Index c = 0; c < W.cols(); ++c) W(r, c) = wflat[at++];
        weights.push_back(std::move(W));
        biases.push_back(Eigen::Map<Eigen::VectorXd>(bflat.data(), w[l + 1]));
    }
    return DenseNet(spec, std::move(weights), std::move(biases), l2);
}

}  // namespace ggnam
