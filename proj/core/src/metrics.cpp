#include "ggnam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ggnam {

double auc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    if (scores.size() != labels.size() || scores.size() == 0)
        throw InvalidInputError("auc: empty or mismatched inputs");
    const Eigen::Index n = scores.size();
    Eigen::Index pos = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (labels(i) != 0.0 && labels(i) != 1.0)
            throw InvalidInputError("auc: labels must be 0 or 1");
        if (labels(i) == 1.0) ++pos;
    }
    if (pos == 0 || pos == n)
        throw MetricError("auc: undefined with a single class");

    // average ranks with mid-rank tie handling
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return scores(a) < scores(b);
    });
    double rank_sum_pos = 0.0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i;
        while (j + 1 < n && scores(order[j + 1]) == scores(order[i])) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index k = i; k <= j; ++k)
            if (labels(order[k]) == 1.0) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double neg = static_cast<double>(n - pos);
    return (rank_sum_pos - 0.5 * pos * (pos + 1)) / (static_cast<double>(pos) * neg);
}

double rmse(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
    if (predictions.size() != targets.size() || predictions.size() == 0)
        throw InvalidInputError("rmse: empty or mismatched inputs");
    return std::sqrt((predictions - targets).squaredNorm() /
                     static_cast<double>(predictions.size()));
}

double accuracy_metric(TaskKind task, const Eigen::VectorXd& scores,
                       const Eigen::VectorXd& targets) {
    return task == TaskKind::regression ? -rmse(scores, targets)
                                        : auc(scores, targets);
}

HessianMatrix integrated_hessian(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::MatrixXd& rows, double h) {
    if (h <= 0) throw InvalidInputError("integrated_hessian: h must be positive");
    const Eigen::Index p = rows.cols();
    HessianMatrix out;
    out.step = h;
    out.H = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i; j < p; ++j) {
            double sumsq = 0.0;
            for (Eigen::Index k = 0; k < rows.rows(); ++k) {
                Eigen::VectorXd x = rows.row(k);
                double d2;
                if (i == j) {
                    Eigen::VectorXd up = x, down = x;
                    up(i) += h;
                    down(i) -= h;
                    d2 = (f(up) - 2.0 * f(x) + f(down)) / (h * h);
                } else {
                    Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
                    pp(i) += h; pp(j) += h;
                    pm(i) += h; pm(j) -= h;
                    mp(i) -= h; mp(j) += h;
                    mm(i) -= h; mm(j) -= h;
                    d2 = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
                }
                if (!std::isfinite(d2))
                    throw MetricError("integrated_hessian: non-finite derivative at row " +
                                      std::to_string(k) + ", pair (" +
                                      std::to_string(i + 1) + "," +
                                      std::to_string(j + 1) + ")");
                sumsq += d2 * d2;
            }
            const double value = std::sqrt(sumsq);
            out.H(i, j) = value;
            out.H(j, i) = value;  // shared computation keeps symmetry exact
        }
    }
    return out;
}

namespace {

std::vector<double> bin_edges(const Eigen::VectorXd& col, int bins,
                              bool equal_width) {
    std::vector<double> sorted(col.data(), col.data() + col.size());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    if (equal_width) {
        const double lo = sorted.front(), hi = sorted.back();
        for (int b = 1; b < bins; ++b)
            edges.push_back(lo + (hi - lo) * b / bins);
    } else {
        for (int b = 1; b < bins; ++b) {
            const std::size_t idx =
                std::min(sorted.size() - 1,
                         static_cast<std::size_t>(sorted.size() * b / bins));
            edges.push_back(sorted[idx]);
        }
    }
    return edges;
}

int bin_of(double v, const std::vector<double>& edges) {
    int b = 0;
    for (double e : edges) {
        if (v < e) break;
        ++b;
    }
    return b;
}

}  // namespace

JmpMatrix joint_marginal_matrix(const TabularDataset& dataset, int feature_i,
                                int feature_j, int bins, int min_count,
                                bool equal_width) {
    if (dataset.task != TaskKind::binary_classification)
        throw InvalidInputError("joint_marginal_matrix: classification data required");
    const Eigen::VectorXd ci = dataset.X.col(feature_i - 1);
    const Eigen::VectorXd cj = dataset.X.col(feature_j - 1);
    for (const auto* col : {&ci, &cj}) {
        std::vector<double> vals(col->data(), col->data() + col->size());
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        if (static_cast<int>(vals.size()) < bins)
            throw InvalidInputError(
                "joint_marginal_matrix: feature has fewer distinct values than "
                "bins; use fewer bins");
    }
    JmpMatrix out;
    out.edges_i = bin_edges(ci, bins, equal_width);
    out.edges_j = bin_edges(cj, bins, equal_width);
    out.counts = Eigen::MatrixXi::Zero(bins, bins);
    Eigen::MatrixXd positives = Eigen::MatrixXd::Zero(bins, bins);
    for (int r = 0; r < dataset.rows(); ++r) {
        const int bi = bin_of(ci(r), out.edges_i);
        const int bj = bin_of(cj(r), out.edges_j);
        out.counts(bi, bj) += 1;
        positives(bi, bj) += dataset.y(r);
    }
    out.probabilities = Eigen::MatrixXd::Constant(bins, bins, JmpMatrix::kSentinel);
    for (int a = 0; a < bins; ++a)
        for (int b = 0; b < bins; ++b)
            if (out.counts(a, b) >= min_count)
                out.probabilities(a, b) = positives(a, b) / out.counts(a, b);
    return out;
}

}  // namespace ggnam
