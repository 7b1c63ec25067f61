#include "ggnam/search.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "ggnam/jobs.hpp"
#include "ggnam/metrics.hpp"

namespace ggnam {

double SearchOptions::resolved_epsilon_select(TaskKind task) const {
    if (std::isfinite(epsilon_select)) return epsilon_select;
    return task == TaskKind::regression ? 0.002 : 0.005;
}

double SearchOptions::resolved_epsilon_group(TaskKind task) const {
    if (std::isfinite(epsilon_group)) return epsilon_group;
    return task == TaskKind::regression ? 0.005 : 0.01;
}

int SearchOptions::resolved_workers() const {
    return workers > 0 ? workers : default_worker_count();
}

namespace {

struct Scored {
    FitResult fit;
    double val_loss = 0.0;
    double val_metric = 0.0;
};

Scored fit_and_score(const PartitionSpec& partition, const TabularDataset& train,
                     const TabularDataset& validation, TaskKind task,
                     const FitOptions& options, const Scaler& scaler,
                     std::uint64_t seed, int restarts = 1) {
    Scored best;
    for (int r = 0; r < std::max(1, restarts); ++r) {
        const std::uint64_t s =
            r == 0 ? seed : derive_seed(seed, "restart" + std::to_string(r));
        Scored out;
        out.fit = fit(partition, train, validation, task, options, scaler, s);
        const Eigen::VectorXd scores = out.fit.model.score_batch(validation.X);
        out.val_loss = loss_value(loss_for_task(task), scores, validation.y);
        out.val_metric = accuracy_metric(task, scores, validation.y);
        if (r == 0 || out.val_loss < best.val_loss) best = std::move(out);
    }
    return best;
}

std::vector<int> without(const std::vector<int>& set, int element) {
    std::vector<int> out;
    out.reserve(set.size());
    for (int v : set)
        if (v != element) out.push_back(v);
    return out;
}

}  // namespace

SelectionResult forward_stepwise_select(const TabularDataset& train,
                                        const TabularDataset& validation,
                                        TaskKind task, double epsilon,
                                        const SearchOptions& options,
                                        std::uint64_t seed) {
    if (!(epsilon > 0))
        throw InvalidInputError("forward_stepwise_select: epsilon must be > 0");
    const int p = train.features();
    const Scaler no_scaler;

    SelectionResult result;
    result.trace.epsilon = epsilon;
    result.linear.resize(p);
    std::iota(result.linear.begin(), result.linear.end(), 1);

    const Scored lalr =
        fit_and_score(preset_partition(PresetKind::lalr, p), train, validation,
                      task, options.fit, no_scaler, derive_seed(seed, "select/lalr"),
                      options.restarts);
    const Scored fcnn =
        fit_and_score(preset_partition(PresetKind::fcnn, p), train, validation,
                      task, options.fit, no_scaler, derive_seed(seed, "select/fcnn"),
                      options.restarts);
    result.trace.lalr_loss = lalr.val_loss;
    result.trace.lalr_metric = lalr.val_metric;
    result.trace.fcnn_loss = fcnn.val_loss;
    result.trace.fcnn_metric = fcnn.val_metric;

    double current_metric = lalr.val_metric;
    if (fcnn.val_metric - current_metric <= epsilon) {
        result.trace.stop_reason = "linear sufficient";
        return result;
    }

    int round = 0;
    while (fcnn.val_metric - current_metric > epsilon && !result.linear.empty()) {
        ++round;
        const std::vector<int> candidates = result.linear;
        std::vector<Scored> scored(candidates.size());
        parallel_for(
            static_cast<int>(candidates.size()), options.resolved_workers(),
            [&](int k) {
                const int u = candidates[static_cast<std::size_t>(k)];
                std::vector<int> group = result.nonlinear;
                group.push_back(u);
                std::sort(group.begin(), group.end());
                const PartitionSpec part =
                    make_partition(p, without(result.linear, u), {group});
                scored[static_cast<std::size_t>(k)] = fit_and_score(
                    part, train, validation, task, options.fit, no_scaler,
                    derive_seed(seed, "select/round" + std::to_string(round) +
                                          "/feat" + std::to_string(u)),
                    options.restarts);
            });

        // argmin of validation loss; candidates ascend, ties keep lowest index
        std::size_t best = 0;
        for (std::size_t k = 1; k < scored.size(); ++k)
            if (scored[k].val_loss < scored[best].val_loss) best = k;

        const int m = candidates[best];
        result.linear = without(result.linear, m);
        result.nonlinear.push_back(m);
        current_metric = scored[best].val_metric;
        result.trace.steps.push_back({m, scored[best].val_loss, scored[best].val_metric});
    }
    result.trace.stop_reason =
        result.linear.empty() ? "all features nonlinear" : "gap closed";
    return result;
}

SeparabilityMatrix separability_matrix(const TabularDataset& train,
                                       const TabularDataset& validation,
                                       TaskKind task,
                                       const std::vector<int>& linear,
                                       const std::vector<int>& nonlinear,
                                       const SearchOptions& options,
                                       std::uint64_t seed) {
    if (nonlinear.size() < 2)
        throw InvalidInputError("separability_matrix: nothing to separate");
    const int p = train.features();
    const Scaler no_scaler;

    SeparabilityMatrix out;
    out.features = nonlinear;
    std::sort(out.features.begin(), out.features.end());
    const int m = static_cast<int>(out.features.size());
    out.A = Eigen::MatrixXd::Zero(m, m);

    // one job per upper-triangle pair, plus one for the shared diagonal
    struct Job {
        int i, j;  // i == j marks the diagonal job
    };
    std::vector<Job> jobs;
    jobs.push_back({-1, -1});
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) jobs.push_back({i, j});

    std::vector<double> acc(jobs.size(), 0.0);
    parallel_for(
        static_cast<int>(jobs.size()), options.resolved_workers(), [&](int k) {
            const Job job = jobs[static_cast<std::size_t>(k)];
            PartitionSpec part;
            std::uint64_t job_seed;
            if (job.i < 0) {
                part = make_partition(p, linear, {out.features});
                job_seed = derive_seed(seed, "sep/diag");
            } else {
                const int vi = out.features[static_cast<std::size_t>(job.i)];
                const int vj = out.features[static_cast<std::size_t>(job.j)];
                part = make_partition(
                    p, linear,
                    {without(out.features, vi), without(out.features, vj)},
                    /*allow_overlap=*/true);
                job_seed = derive_seed(seed, "sep/" + std::to_string(vi) + "/" +
                                                 std::to_string(vj));
            }
            acc[static_cast<std::size_t>(k)] =
                fit_and_score(part, train, validation, task, options.fit,
                              no_scaler, job_seed, options.restarts)
                    .val_metric;
        });

    for (int i = 0; i < m; ++i) out.A(i, i) = acc[0];
    std::size_t at = 1;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            out.A(i, j) = acc[at];
            out.A(j, i) = acc[at];
            ++at;
        }
    return out;
}

std::string SeparabilityMatrix::to_csv() const {
    std::ostringstream out;
    out << "feature";
    for (int f : features) out << ",x" << f;
    out << "\n";
    for (std::size_t i = 0; i < features.size(); ++i) {
        out << "x" << features[i];
        for (std::size_t j = 0; j < features.size(); ++j)
            out << "," << A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out << "\n";
    }
    return out.str();
}

std::vector<std::vector<int>> group_nonlinear(const SeparabilityMatrix& A,
                                              double epsilon) {
    const int m = static_cast<int>(A.features.size());
    std::vector<int> parent(m);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            // one-sided: only a drop in accuracy counts as an interaction
            if (A.A(i, i) - A.A(i, j) >= epsilon) parent[find(i)] = find(j);
        }
    std::map<int, std::vector<int>> components;
    for (int i = 0; i < m; ++i) components[find(i)].push_back(A.features[i]);
    std::vector<std::vector<int>> groups;
    for (auto& [root, members] : components) {
        std::sort(members.begin(), members.end());
        groups.push_back(members);
    }
    std::sort(groups.begin(), groups.end());
    return groups;
}

std::string architecture_report(int p, const std::vector<int>& linear,
                                const std::vector<std::vector<int>>& groups) {
    std::vector<int> all(p);
    std::iota(all.begin(), all.end(), 1);
    std::vector<int> singles;
    std::vector<std::vector<int>> multi;
    for (const auto& g : groups)
        (g.size() == 1 ? singles.push_back(g[0]) : multi.push_back(g));

    auto group_list = [](const std::vector<std::vector<int>>& gs) {
        std::ostringstream out;
        for (std::size_t k = 0; k < gs.size(); ++k) {
            if (k) out << "; ";
            out << "(";
            for (std::size_t i = 0; i < gs[k].size(); ++i)
                out << (i ? ", " : "") << "x" << gs[k][i];
            out << ")";
        }
        return out.str();
    };

    std::ostringstream out;
    out << "Model | Linear | Individual nonlinear | Nonlinear groups\n";
    out << "LaLR | " << format_feature_ranges(all) << " |  | \n";
    out << "FCNN |  |  | (x1, ..., x" << p << ")\n";
    out << "NAM |  | " << format_feature_ranges(all) << " | \n";
    out << "GGNAM | " << format_feature_ranges(linear) << " | "
        << format_feature_ranges(singles) << " | " << group_list(multi) << "\n";
    return out.str();
}

std::string selection_trace_to_json(const SelectionTrace& trace) {
    nlohmann::json j;
    j["lalr"] = {{"val_loss", trace.lalr_loss}, {"val_metric", trace.lalr_metric}};
    j["fcnn"] = {{"val_loss", trace.fcnn_loss}, {"val_metric", trace.fcnn_metric}};
    j["epsilon"] = trace.epsilon;
    j["stop_reason"] = trace.stop_reason;
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : trace.steps)
        steps.push_back({{"promoted", s.promoted},
                         {"val_loss", s.val_loss},
                         {"val_metric", s.val_metric}});
    j["steps"] = steps;
    return j.dump(2);
}

PipelineResult fit_ggnam_pipeline(const TabularDataset& train,
                                  const TabularDataset& validation,
                                  const TabularDataset& test, TaskKind task,
                                  const Scaler& scaler,
                                  const SearchOptions& options,
                                  std::uint64_t seed,
                                  const StageObserver& observer) {
    const int p = train.features();
    const std::string metric_name =
        task == TaskKind::regression ? "rmse" : "auc";
    PipelineResult out;

    auto record = [&](const std::string& name, const GgnamModel& model) {
        const double val =
            accuracy_metric(task, model.score_batch(validation.X), validation.y);
        const double tst = accuracy_metric(task, model.score_batch(test.X), test.y);
        // metrics are reported on their natural scale, RMSE positive
        const double sign = task == TaskKind::regression ? -1.0 : 1.0;
        out.metrics[name + "_val_" + metric_name] = sign * val;
        out.metrics[name + "_test_" + metric_name] = sign * tst;
    };

    auto notify = [&](const std::string& stage, const nlohmann::json& payload) {
        if (observer) observer(stage, payload.dump(2));
    };

    const FitResult lalr =
        fit(preset_partition(PresetKind::lalr, p), train, validation, task,
            options.fit, scaler, derive_seed(seed, "pipeline/lalr"));
    record("lalr", lalr.model);
    notify("lalr", {{"test_" + metric_name, out.metrics["lalr_test_" + metric_name]}});

    const FitResult fcnn =
        fit(preset_partition(PresetKind::fcnn, p), train, validation, task,
            options.fit, scaler, derive_seed(seed, "pipeline/fcnn"));
    record("fcnn", fcnn.model);
    notify("fcnn", {{"test_" + metric_name, out.metrics["fcnn_test_" + metric_name]}});

    out.selection = forward_stepwise_select(
        train, validation, task, options.resolved_epsilon_select(task), options,
        derive_seed(seed, "pipeline/select"));
    notify("selection", nlohmann::json::parse(selection_trace_to_json(out.selection.trace)));

    if (out.selection.nonlinear.size() >= 2) {
        out.separability = separability_matrix(
            train, validation, task, out.selection.linear,
            out.selection.nonlinear, options, derive_seed(seed, "pipeline/sep"));
        out.groups = group_nonlinear(*out.separability,
                                     options.resolved_epsilon_group(task));
        notify("separability", {{"csv", out.separability->to_csv()}});
    } else {
        for (int v : out.selection.nonlinear) out.groups.push_back({v});
    }
    notify("grouping", {{"groups", out.groups}});

    const PartitionSpec final_part =
        make_partition(p, out.selection.linear, out.groups);
    FitResult final_fit = fit(final_part, train, validation, task, options.fit,
                              scaler, derive_seed(seed, "pipeline/final"));
    record("ggnam", final_fit.model);
    out.model = std::move(final_fit.model);
    out.history = std::move(final_fit.history);
    out.architecture_report =
        architecture_report(p, out.selection.linear, out.groups);
    notify("final", {{"report", out.architecture_report}});
    return out;
}

}  // namespace ggnam
