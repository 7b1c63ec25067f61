#include <doctest.h>

#include <random>

#include "ggnam/nn.hpp"

using namespace ggnam;

TEST_CASE("parameter counts follow the layer arithmetic") {
    LayerSpec clf{23, {5}, Activation::logistic, 1};
    CHECK(clf.param_count() == 126);
    LayerSpec reg{13, {16, 8}, Activation::relu, 1};
    CHECK(reg.param_count() == 369);
    LayerSpec affine{4, {}, Activation::identity, 1};
    CHECK(affine.param_count() == 5);
}

TEST_CASE("param_count matches flattened parameters for random specs") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        LayerSpec spec;
        spec.input_width = 1 + static_cast<int>(rng() % 12);
        const int depth = static_cast<int>(rng() % 4);
        for (int d = 0; d < depth; ++d)
            spec.hidden_widths.push_back(1 + static_cast<int>(rng() % 9));
        spec.activation = Activation::logistic;
        DenseNet net(spec, 0.0, rng());
        CHECK(net.params().size() == static_cast<Eigen::Index>(spec.param_count()));
    }
}

TEST_CASE("init is deterministic per seed and rejects bad specs") {
    LayerSpec spec{6, {4}, Activation::relu, 1};
    DenseNet a = init_network(spec, 0.0, 42);
    DenseNet b = init_network(spec, 0.0, 42);
    CHECK(a.params() == b.params());
    DenseNet c = init_network(spec, 0.0, 43);
    CHECK(a.params() != c.params());
    for (const auto& bias : a.biases()) CHECK(bias.isZero());

    LayerSpec bad{5, {0}, Activation::relu, 1};
    CHECK_THROWS_AS(init_network(bad, 0.0, 1), InvalidSpecError);
}

TEST_CASE("forward evaluates the layer algebra") {
    SUBCASE("all-zero parameters map anything to zero") {
        DenseNet net(LayerSpec{3, {4}, Activation::logistic, 1}, 0.0, 1);
        net.set_params(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.param_count())));
        CHECK(net.forward(Eigen::Vector3d(1.0, -2.0, 0.5)) == 0.0);
    }
    SUBCASE("bare affine unit is the identity with unit weight") {
        DenseNet net(LayerSpec{1, {}, Activation::identity, 1}, 0.0, 1);
        Eigen::VectorXd params(2);
        params << 1.0, 0.0;
        net.set_params(params);
        CHECK(net.forward(Eigen::VectorXd::Constant(1, 3.0)) == doctest::Approx(3.0));
    }
    SUBCASE("1-1-1 logistic net with doubled output weight") {
        DenseNet net(LayerSpec{1, {1}, Activation::logistic, 1}, 0.0, 1);
        Eigen::VectorXd params(4);  // w1, b1, w2, b2
        params << 1.0, 0.0, 2.0, 0.0;
        net.set_params(params);
        CHECK(net.forward(Eigen::VectorXd::Zero(1)) == doctest::Approx(1.0));
    }
    SUBCASE("dimension mismatch is a shape error") {
        DenseNet net(LayerSpec{3, {2}, Activation::relu, 1}, 0.0, 1);
        CHECK_THROWS_AS(net.forward(Eigen::Vector2d(1.0, 2.0)), ShapeError);
    }
}

TEST_CASE("backprop gradients") {
    SUBCASE("zero gradient at an exact interpolating minimum") {
        // f(x) = x reproduces y = x exactly, lambda = 0
        DenseNet net(LayerSpec{1, {}, Activation::identity, 1}, 0.0, 1);
        Eigen::VectorXd params(2);
        params << 1.0, 0.0;
        net.set_params(params);
        Eigen::MatrixXd X(3, 1);
        X << -1.0, 0.5, 2.0;
        Eigen::VectorXd g = backprop(net, X, X.col(0), {LossKind::mse});
        CHECK(g.norm() == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("hand derivative of a single affine unit") {
        DenseNet net(LayerSpec{1, {}, Activation::identity, 1}, 0.0, 1);
        Eigen::VectorXd params(2);
        params << 1.0, 0.0;
        net.set_params(params);
        Eigen::MatrixXd X(1, 1);
        X << 2.0;
        Eigen::VectorXd y(1);
        y << 0.0;
        Eigen::VectorXd g = backprop(net, X, y, {LossKind::mse});
        CHECK(g(0) == doctest::Approx(8.0));  // d/dw (wx-y)^2 = 2(wx-y)x
        CHECK(g(1) == doctest::Approx(4.0));
    }
    SUBCASE("empty batch rejected") {
        DenseNet net(LayerSpec{2, {}, Activation::identity, 1}, 0.0, 1);
        Eigen::MatrixXd X(0, 2);
        CHECK_THROWS_AS(backprop(net, X, Eigen::VectorXd(0), {LossKind::mse}),
                        InvalidInputError);
    }
}

TEST_CASE("gradient_check against central differences") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(8, 4);
    Eigen::VectorXd y(8);
    for (int r = 0; r < 8; ++r) {
        for (int c = 0; c < 4; ++c) X(r, c) = gauss(rng);
        y(r) = gauss(rng);
    }
    SUBCASE("logistic net, mse, with and without l2") {
        for (double lambda : {0.0, 2e-4}) {
            DenseNet net(LayerSpec{4, {5}, Activation::logistic, 1}, lambda, 3);
            CHECK(gradient_check(net, X, y, {LossKind::mse}, 1e-5) < 1e-4);
        }
    }
    SUBCASE("binary cross entropy") {
        Eigen::VectorXd labels = (y.array() > 0).cast<double>();
        DenseNet net(LayerSpec{4, {5}, Activation::logistic, 1}, 0.0, 5);
        CHECK(gradient_check(net, X, labels, {LossKind::binary_cross_entropy}, 1e-5) < 1e-4);
    }
    SUBCASE("zero network on zero targets has a flat loss surface") {
        DenseNet net(LayerSpec{4, {3}, Activation::logistic, 1}, 0.0, 1);
        net.set_params(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.param_count())));
        Eigen::VectorXd zeros = Eigen::VectorXd::Zero(8);
        Eigen::MatrixXd Xz = Eigen::MatrixXd::Zero(8, 4);
        CHECK(gradient_check(net, Xz, zeros, {LossKind::mse}, 1e-5) ==
              doctest::Approx(0.0).epsilon(1e-8));
    }
    SUBCASE("randomized smooth-regime fidelity") {
        for (int trial = 0; trial < 25; ++trial) {
            LayerSpec spec{4, {1 + static_cast<int>(rng() % 6)},
                           Activation::logistic, 1};
            DenseNet net(spec, (trial % 2) ? 2e-4 : 0.0, rng());
            CHECK(gradient_check(net, X, y, {LossKind::mse}, 1e-5) < 1e-4);
        }
    }
}

namespace {

struct ToyData {
    Eigen::MatrixXd Xtr, Xval;
    Eigen::VectorXd ytr, yval;
};

// linearly separable two-feature labels
ToyData separable_toy(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ToyData d;
    d.Xtr.resize(200, 2);
    d.ytr.resize(200);
    d.Xval.resize(60, 2);
    d.yval.resize(60);
    auto fill = [&](Eigen::MatrixXd& X, Eigen::VectorXd& y) {
        for (int r = 0; r < X.rows(); ++r) {
            X(r, 0) = gauss(rng);
            X(r, 1) = gauss(rng);
            y(r) = (X(r, 0) + 2.0 * X(r, 1) > 0) ? 1.0 : 0.0;
        }
    };
    fill(d.Xtr, d.ytr);
    fill(d.Xval, d.yval);
    return d;
}

}  // namespace

TEST_CASE("train_epochs") {
    auto toy = separable_toy(3);
    LayerSpec spec{2, {5}, Activation::logistic, 1};
    LossSpec bce{LossKind::binary_cross_entropy};

    SUBCASE("zero learning rate leaves parameters untouched") {
        DenseNet net(spec, 0.0, 9);
        const Eigen::VectorXd before = net.params();
        AdamConfig opt;
        opt.learning_rate = 0.0;
        auto history = train_epochs(net, toy.Xtr, toy.ytr, toy.Xval, toy.yval, bce,
                                    opt, {10, 25, 64, 1});
        CHECK(net.params() == before);
        for (double v : history.val_loss)
            CHECK(v == doctest::Approx(history.val_loss.front()));
    }
    SUBCASE("validation cross-entropy improves on a separable toy set") {
        DenseNet net(spec, 0.0, 9);
        const double initial = loss_value(bce, net.score_batch(toy.Xval), toy.yval);
        train_epochs(net, toy.Xtr, toy.ytr, toy.Xval, toy.yval, bce, {}, {100, 25, 64, 1});
        CHECK(loss_value(bce, net.score_batch(toy.Xval), toy.yval) < initial);
        CHECK(net.all_finite());
    }
    SUBCASE("same seed reproduces the history exactly") {
        DenseNet a(spec, 0.0, 9);
        DenseNet b(spec, 0.0, 9);
        auto ha = train_epochs(a, toy.Xtr, toy.ytr, toy.Xval, toy.yval, bce, {}, {30, 25, 64, 5});
        auto hb = train_epochs(b, toy.Xtr, toy.ytr, toy.Xval, toy.yval, bce, {}, {30, 25, 64, 5});
        CHECK(ha.train_loss == hb.train_loss);
        CHECK(ha.val_loss == hb.val_loss);
        CHECK(a.params() == b.params());
    }
    SUBCASE("early stopping restores the best-validation parameters") {
        DenseNet net(spec, 0.0, 9);
        auto history =
            train_epochs(net, toy.Xtr, toy.ytr, toy.Xval, toy.yval, bce, {}, {150, 10, 64, 2});
        const double final_val = loss_value(bce, net.score_batch(toy.Xval), toy.yval);
        double best = history.val_loss.front();
        for (double v : history.val_loss) best = std::min(best, v);
        CHECK(final_val == doctest::Approx(best).epsilon(1e-12));
    }
    SUBCASE("l2 shrinks weights under zero-information targets") {
        std::mt19937_64 rng(4);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::MatrixXd X(128, 3);
        Eigen::VectorXd y(128);
        for (int r = 0; r < 128; ++r) {
            for (int c = 0; c < 3; ++c) X(r, c) = gauss(rng);
            y(r) = gauss(rng);  // pure noise
        }
        auto weight_norm = [](const DenseNet& n) {
            double s = 0;
            for (const auto& W : n.weights()) s += W.squaredNorm();
            return s;
        };
        DenseNet plain(LayerSpec{3, {6}, Activation::logistic, 1}, 0.0, 21);
        DenseNet penalized(LayerSpec{3, {6}, Activation::logistic, 1}, 1e-2, 21);
        TrainSchedule sched{120, 200, 32, 8};
        train_epochs(plain, X, y, X, y, {LossKind::mse}, {}, sched);
        train_epochs(penalized, X, y, X, y, {LossKind::mse}, {}, sched);
        CHECK(weight_norm(penalized) < weight_norm(plain));
    }
}

TEST_CASE("network json round-trips bit-exactly") {
    DenseNet net(LayerSpec{5, {4, 3}, Activation::relu, 1}, 2e-4, 77);
    DenseNet copy = net_from_json(net_to_json(net));
    CHECK(copy.params() == net.params());
    CHECK(copy.l2_lambda() == net.l2_lambda());
    Eigen::VectorXd x(5);
    x << 0.3, -1.2, 0.0, 2.5, -0.7;
    CHECK(copy.forward(x) == net.forward(x));
}
