#include "ggnam/additive.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

namespace ggnam {

PartitionSpec make_partition(int p, std::vector<int> linear,
                             std::vector<std::vector<int>> groups,
                             bool allow_overlap) {
    if (p < 1) throw PartitionError("make_partition: p must be >= 1");
    auto check_range = [p](int idx) {
        if (idx < 1 || idx > p)
            throw PartitionError("feature index " + std::to_string(idx) +
                                 " out of range 1.." + std::to_string(p));
    };
    std::sort(linear.begin(), linear.end());
    for (int u : linear) check_range(u);
    for (auto& g : groups) {
        if (g.empty()) throw PartitionError("empty nonlinear group");
        std::sort(g.begin(), g.end());
        for (int v : g) check_range(v);
    }

    std::set<int> seen(linear.begin(), linear.end());
    if (seen.size() != linear.size())
        throw PartitionError("duplicate index in linear set");
    std::set<int> covered = seen;
    std::vector<int> overlapping;
    for (const auto& g : groups) {
        for (int v : g) {
            if (!covered.insert(v).second) overlapping.push_back(v);
        }
    }
    if (!allow_overlap && !overlapping.empty()) {
        std::string msg = "overlapping feature indices:";
        for (int v : overlapping) msg += " " + std::to_string(v);
        throw PartitionError(msg);
    }
    for (int i = 1; i <= p; ++i)
        if (!covered.count(i))
            throw PartitionError("feature index " + std::to_string(i) +
                                 " covered by neither linear set nor any group");

    PartitionSpec spec;
    spec.p = p;
    spec.linear = std::move(linear);
    spec.groups = std::move(groups);
    spec.allow_overlap = allow_overlap;
    return spec;
}

PresetKind preset_from_string(const std::string& s) {
    if (s == "lalr") return PresetKind::lalr;
    if (s == "fcnn") return PresetKind::fcnn;
    if (s == "nam") return PresetKind::nam;
    throw InvalidSpecError("unknown preset: " + s);
}

PartitionSpec preset_partition(PresetKind kind, int p) {
    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 1);
    switch (kind) {
        case PresetKind::lalr:
            return make_partition(p, all, {});
        case PresetKind::fcnn:
            return make_partition(p, {}, {all});
        case PresetKind::nam: {
            std::vector<std::vector<int>> singles;
            for (int i = 1; i <= p; ++i) singles.push_back({i});
            return make_partition(p, {}, singles);
        }
    }
    throw InvalidSpecError("unknown preset");
}

LinkKind link_for_task(TaskKind task) {
    return task == TaskKind::regression ? LinkKind::identity : LinkKind::logistic;
}

LossSpec loss_for_task(TaskKind task) {
    return {task == TaskKind::regression ? LossKind::mse
                                         : LossKind::binary_cross_entropy};
}

double apply_link(LinkKind link, double pre_link) {
    if (link == LinkKind::identity) return pre_link;
    if (pre_link >= 0) return 1.0 / (1.0 + std::exp(-pre_link));
    const double e = std::exp(pre_link);
    return e / (1.0 + e);
}

double Contributions::total() const {
    // canonical left-to-right order: intercept, linear terms, group terms
    double sum = intercept;
    for (double t : linear_terms) sum += t;
    for (double t : group_terms) sum += t;
    return sum;
}

GgnamModel::GgnamModel(PartitionSpec partition, LinkKind link,
                       const std::vector<int>& subnet_hidden,
                       Activation activation, double l2_lambda,
                       std::uint64_t seed)
    : partition_(std::move(partition)), link_(link) {
    beta_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(partition_.linear.size()));
    for (std::size_t g = 0; g < partition_.groups.size(); ++g) {
        LayerSpec spec;
        spec.input_width = static_cast<int>(partition_.groups[g].size());
        spec.hidden_widths = subnet_hidden;
        spec.activation = activation;
        subnets_.emplace_back(spec, l2_lambda, seed + 1000003ULL * (g + 1));
    }
}

std::size_t GgnamModel::param_count() const {
    std::size_t total = 1 + partition_.linear.size();
    for (const auto& net : subnets_) total += net.param_count();
    return total;
}

Eigen::VectorXd GgnamModel::params() const {
    Eigen::VectorXd flat(param_count());
    Eigen::Index at = 0;
    flat(at++) = alpha_;
    for (Eigen::Index i = 0; i < beta_.size(); ++i) flat(at++) = beta_(i);
    for (const auto& net : subnets_) {
        const Eigen::VectorXd sub = net.params();
        flat.segment(at, sub.size()) = sub;
        at += sub.size();
    }
    return flat;
}

void GgnamModel::set_params(const Eigen::VectorXd& flat) {
    if (static_cast<std::size_t>(flat.size()) != param_count())
        throw ShapeError("GgnamModel::set_params: size mismatch");
    Eigen::Index at = 0;
    alpha_ = flat(at++);
    for (Eigen::Index i = 0; i < beta_.size(); ++i) beta_(i) = flat(at++);
    for (auto& net : subnets_) {
        const auto n = static_cast<Eigen::Index>(net.param_count());
        net.set_params(flat.segment(at, n));
        at += n;
    }
}

namespace {

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X,
                               const std::vector<int>& one_based) {
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(one_based.size()));
    for (std::size_t k = 0; k < one_based.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = X.col(one_based[k] - 1);
    return out;
}

}  // namespace

Eigen::VectorXd GgnamModel::score_batch(const Eigen::MatrixXd& X) const {
    if (X.cols() != partition_.p)
        throw ShapeError("score_batch: expected " + std::to_string(partition_.p) +
                         " features, got " + std::to_string(X.cols()));
    Eigen::VectorXd score = Eigen::VectorXd::Constant(X.rows(), alpha_);
    if (beta_.size() > 0)
        score += select_columns(X, partition_.linear) * beta_;
    for (std::size_t g = 0; g < subnets_.size(); ++g)
        score += subnets_[g].score_batch(select_columns(X, partition_.groups[g]));
    return score;
}

Eigen::VectorXd GgnamModel::grad(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& dscore) const {
    Eigen::VectorXd flat(param_count());
    Eigen::Index at = 0;
    flat(at++) = dscore.sum();
    if (beta_.size() > 0) {
        Eigen::VectorXd db = select_columns(X, partition_.linear).transpose() * dscore;
        flat.segment(at, db.size()) = db;
        at += db.size();
    }
    for (std::size_t g = 0; g < subnets_.size(); ++g) {
        ForwardCache cache;
        subnets_[g].score_batch(select_columns(X, partition_.groups[g]), &cache);
        const Eigen::VectorXd sub = subnets_[g].backward(cache, dscore, true);
        flat.segment(at, sub.size()) = sub;
        at += sub.size();
    }
    return flat;
}

double GgnamModel::penalty() const {
    double total = 0.0;
    for (const auto& net : subnets_) total += net.penalty();
    return total;
}

Eigen::VectorXd GgnamModel::standardize_row(const Eigen::VectorXd& x_raw) const {
    if (x_raw.size() != partition_.p)
        throw ShapeError("predict: expected " + std::to_string(partition_.p) +
                         " features, got " + std::to_string(x_raw.size()));
    return scaler_.empty() ? x_raw : scaler_.transform(x_raw);
}

Prediction GgnamModel::predict(const Eigen::VectorXd& x_raw) const {
    Eigen::MatrixXd X = standardize_row(x_raw).transpose();
    Prediction out;
    out.pre_link = score_batch(X)(0);
    out.post_link = apply_link(link_, out.pre_link);
    return out;
}

Eigen::VectorXd GgnamModel::predict_batch(const Eigen::MatrixXd& X_raw) const {
    const Eigen::MatrixXd X = scaler_.empty() ? X_raw : scaler_.transform(X_raw);
    Eigen::VectorXd pre = score_batch(X);
    return pre.unaryExpr([this](double s) { return apply_link(link_, s); });
}

Contributions GgnamModel::contributions(const Eigen::VectorXd& x_raw) const {
    const Eigen::VectorXd x = standardize_row(x_raw);
    Contributions out;
    out.intercept = alpha_;
    for (std::size_t i = 0; i < partition_.linear.size(); ++i)
        out.linear_terms.push_back(beta_(static_cast<Eigen::Index>(i)) *
                                   x(partition_.linear[i] - 1));
    for (std::size_t g = 0; g < subnets_.size(); ++g) {
        Eigen::VectorXd xg(static_cast<Eigen::Index>(partition_.groups[g].size()));
        for (std::size_t k = 0; k < partition_.groups[g].size(); ++k)
            xg(static_cast<Eigen::Index>(k)) = x(partition_.groups[g][k] - 1);
        out.group_terms.push_back(subnets_[g].forward(xg));
    }
    return out;
}

FitOptions FitOptions::defaults_for(TaskKind task) {
    FitOptions opts;
    if (task == TaskKind::regression) {
        opts.subnet_hidden = {16, 8};
        opts.activation = Activation::relu;
        opts.l2_lambda = 2e-4;
    } else {
        opts.subnet_hidden = {5};
        opts.activation = Activation::logistic;
        opts.l2_lambda = 0.0;
    }
    opts.defaults_applied = true;
    return opts;
}

FitResult fit(const PartitionSpec& partition, const TabularDataset& train,
              const TabularDataset& validation, TaskKind task,
              const FitOptions& options, const Scaler& scaler,
              std::uint64_t seed) {
    if (train.features() != partition.p)
        throw ShapeError("fit: partition covers " + std::to_string(partition.p) +
                         " features but dataset has " +
                         std::to_string(train.features()));
    FitOptions opts = options;
    if (opts.subnet_hidden.empty() && !opts.defaults_applied) {
        const FitOptions d = FitOptions::defaults_for(task);
        opts.subnet_hidden = d.subnet_hidden;
        opts.activation = d.activation;
        opts.l2_lambda = d.l2_lambda;
        opts.defaults_applied = true;
    }
    FitResult out;
    out.model = GgnamModel(partition, link_for_task(task), opts.subnet_hidden,
                           opts.activation, opts.l2_lambda, seed);
    TrainSchedule schedule = opts.schedule;
    schedule.seed = seed;
    out.history = train_model(out.model, train.X, train.y, validation.X,
                              validation.y, loss_for_task(task), opts.optimizer,
                              schedule);
    out.model.set_scaler(scaler);
    return out;
}

namespace {

double reference_point(const std::vector<double>& grid, double median) {
    if (grid.empty()) throw InvalidInputError("shape_function: empty grid");
    double best = grid[0];
    for (double g : grid)
        if (std::abs(g - median) < std::abs(best - median)) best = g;
    return best;
}

double scale_one(const Scaler& s, int idx0, double raw) {
    if (s.empty()) return raw;
    return (raw - s.mean(idx0)) / s.std(idx0);
}

}  // namespace

std::vector<double> shape_function(const GgnamModel& model, int feature_index,
                                   const std::vector<double>& grid) {
    const auto& part = model.partition();
    const double median = model.scaler().empty()
                              ? 0.0
                              : model.scaler().median(feature_index - 1);
    const double ref = reference_point(grid, median);

    const auto lin_it = std::find(part.linear.begin(), part.linear.end(), feature_index);
    if (lin_it != part.linear.end()) {
        const auto pos = std::distance(part.linear.begin(), lin_it);
        const double b = model.beta()(static_cast<Eigen::Index>(pos));
        std::vector<double> out;
        const double zref = scale_one(model.scaler(), feature_index - 1, ref);
        for (double g : grid)
            out.push_back(b * (scale_one(model.scaler(), feature_index - 1, g) - zref));
        return out;
    }
    for (std::size_t g = 0; g < part.groups.size(); ++g) {
        if (part.groups[g].size() == 1 && part.groups[g][0] == feature_index)
            return group_shape(model, static_cast<int>(g), {grid});
    }
    throw LookupError("feature " + std::to_string(feature_index) +
                      " is not a linear feature or singleton group");
}

std::vector<double> group_shape(const GgnamModel& model, int group_position,
                                const std::vector<std::vector<double>>& grids) {
    const auto& part = model.partition();
    if (group_position < 0 ||
        group_position >= static_cast<int>(part.groups.size()))
        throw LookupError("group position out of range");
    const auto& members = part.groups[static_cast<std::size_t>(group_position)];
    if (grids.size() != members.size())
        throw InvalidInputError("group_shape: need one grid per member feature");

    const auto& net = model.subnets()[static_cast<std::size_t>(group_position)];
    Eigen::VectorXd ref(static_cast<Eigen::Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) {
        const double median =
            model.scaler().empty() ? 0.0 : model.scaler().median(members[k] - 1);
        ref(static_cast<Eigen::Index>(k)) = scale_one(
            model.scaler(), members[k] - 1, reference_point(grids[k], median));
    }
    const double base = net.forward(ref);

    std::vector<double> out;
    std::vector<std::size_t> at(members.size(), 0);
    while (true) {
        Eigen::VectorXd point(static_cast<Eigen::Index>(members.size()));
        for (std::size_t k = 0; k < members.size(); ++k)
            point(static_cast<Eigen::Index>(k)) =
                scale_one(model.scaler(), members[k] - 1, grids[k][at[k]]);
        out.push_back(net.forward(point) - base);
        // row-major advance over the mesh
        std::size_t k = members.size();
        while (k-- > 0) {
            if (++at[k] < grids[k].size()) break;
            at[k] = 0;
            if (k == 0) return out;
        }
    }
}

std::string model_to_json(const GgnamModel& model) {
    nlohmann::json j;
    j["p"] = model.partition_.p;
    j["linear"] = model.partition_.linear;
    j["groups"] = model.partition_.groups;
    j["allow_overlap"] = model.partition_.allow_overlap;
    j["link"] = model.link_ == LinkKind::identity ? "identity" : "logistic";
    j["alpha"] = model.alpha_;
    j["beta"] = std::vector<double>(model.beta_.data(),
                                    model.beta_.data() + model.beta_.size());
    nlohmann::json nets = nlohmann::json::array();
    for (const auto& net : model.subnets_)
        nets.push_back(nlohmann::json::parse(net_to_json(net)));
    j["subnets"] = nets;
    if (!model.scaler_.empty()) {
        const auto& s = model.scaler_;
        j["scaler"] = {
            {"mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size())},
            {"std", std::vector<double>(s.std.data(), s.std.data() + s.std.size())},
            {"constant", s.constant},
            {"median", std::vector<double>(s.median.data(),
                                           s.median.data() + s.median.size())}};
    }
    return j.dump(2);
}

GgnamModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    GgnamModel m;
    m.partition_ = make_partition(j.at("p").get<int>(),
                                  j.at("linear").get<std::vector<int>>(),
                                  j.at("groups").get<std::vector<std::vector<int>>>(),
                                  j.at("allow_overlap").get<bool>());
    m.link_ = j.at("link").get<std::string>() == "identity" ? LinkKind::identity
                                                            : LinkKind::logistic;
    m.alpha_ = j.at("alpha").get<double>();
    auto beta = j.at("beta").get<std::vector<double>>();
    m.beta_ = Eigen::Map<Eigen::VectorXd>(beta.data(),
                                          static_cast<Eigen::Index>(beta.size()));
    for (const auto& nj : j.at("subnets")) m.subnets_.push_back(net_from_json(nj.dump()));
    if (m.subnets_.size() != m.partition_.groups.size())
        throw ShapeError("model_from_json: subnet count mismatch");
    if (j.contains("scaler")) {
        const auto& sj = j.at("scaler");
        auto mean = sj.at("mean").get<std::vector<double>>();
        auto stdv = sj.at("std").get<std::vector<double>>();
        auto med = sj.at("median").get<std::vector<double>>();
        Scaler s;
        s.mean = Eigen::Map<Eigen::VectorXd>(mean.data(),
                                             static_cast<Eigen::Index>(mean.size()));
        s.std = Eigen::Map<Eigen::VectorXd>(stdv.data(),
                                            static_cast<Eigen::Index>(stdv.size()));
        s.median = Eigen::Map<Eigen::VectorXd>(med.data(),
                                               static_cast<Eigen::Index>(med.size()));
        s.constant = sj.at("constant").get<std::vector<bool>>();
        m.scaler_ = std::move(s);
    }
    return m;
}

std::string format_feature_ranges(std::vector<int> indices) {
    if (indices.empty()) return "";
    std::sort(indices.begin(), indices.end());
    std::ostringstream out;
    std::size_t i = 0;
    bool first = true;
    while (i < indices.size()) {
        std::size_t j = i;
        while (j + 1 < indices.size() && indices[j + 1] == indices[j] + 1) ++j;
        if (!first) out << ", ";
        first = false;
        if (j > i + 1)
            out << "x" << indices[i] << "-x" << indices[j];
        else if (j == i + 1)
            out << "x" << indices[i] << ", x" << indices[j];
        else
            out << "x" << indices[i];
        i = j + 1;
    }
    return out.str();
}

}  // namespace ggnam
