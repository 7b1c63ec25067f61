#include <benchmark/benchmark.h>

#include <random>

#include "ggnam/additive.hpp"
#include "ggnam/metrics.hpp"
#include "ggnam/nn.hpp"

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) X(r, c) = gauss(rng);
    return X;
}

void BM_forward_batch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ggnam::DenseNet net({23, {5}, ggnam::Activation::logistic, 1}, 0.0, 1);
    const Eigen::MatrixXd X = random_matrix(n, 23, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.score_batch(X));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_forward_batch)->Arg(128)->Arg(1024)->Arg(8192);

void BM_backprop_batch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ggnam::DenseNet net({13, {16, 8}, ggnam::Activation::relu, 1}, 2e-4, 1);
    const Eigen::MatrixXd X = random_matrix(n, 13, 3);
    const Eigen::VectorXd y = random_matrix(n, 1, 4).col(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ggnam::backprop(net, X, y, {ggnam::LossKind::mse}));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_backprop_batch)->Arg(128)->Arg(1024);

void BM_ggnam_score(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto partition = ggnam::make_partition(
        23, {2, 3, 4, 5, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20,
             21, 22, 23},
        {{1}, {6}});
    ggnam::GgnamModel model(partition, ggnam::LinkKind::logistic, {5},
                            ggnam::Activation::logistic, 0.0, 5);
    const Eigen::MatrixXd X = random_matrix(n, 23, 6);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.score_batch(X));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ggnam_score)->Arg(1024)->Arg(8192);

void BM_auc(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd scores(n), labels(n);
    for (int i = 0; i < n; ++i) {
        scores(i) = unif(rng);
        labels(i) = unif(rng) < 0.25 ? 1.0 : 0.0;
    }
    labels(0) = 1.0;
    labels(n - 1) = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ggnam::auc(scores, labels));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_auc)->Arg(1000)->Arg(30000);

}  // namespace

BENCHMARK_MAIN();
