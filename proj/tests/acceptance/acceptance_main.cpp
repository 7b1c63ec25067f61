// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Criteria that
// need the public datasets skip with a pointer to data/README.md when the
// CSVs have not been fetched into the data directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ggnam/jobs.hpp"
#include "ggnam/metrics.hpp"
#include "ggnam/search.hpp"
#include "synthetic.hpp"

namespace fs = std::filesystem;
using namespace ggnam;

namespace {

enum class Outcome { pass, fail, skip };

struct Tally {
    int failures = 0;
    void report(int id, const std::string& name, Outcome outcome,
                const std::string& detail) {
        const char* tag = outcome == Outcome::pass   ? "PASS"
                          : outcome == Outcome::fail ? "FAIL"
                                                     : "SKIP";
        std::cout << "[" << tag << "] criterion " << id << ": " << name;
        if (!detail.empty()) std::cout << " — " << detail;
        std::cout << std::endl;
        if (outcome == Outcome::fail) ++failures;
    }
};

std::string data_dir() {
    const char* env = std::getenv("GGNAM_DATA_DIR");
    return env ? env : "data";
}

bool dataset_ready(const std::string& name, std::string& manifest_path) {
    manifest_path = data_dir() + "/" + name + ".manifest";
    if (!fs::exists(manifest_path)) return false;
    try {
        const auto manifest = load_manifest(manifest_path);
        return fs::exists(manifest.path);
    } catch (const std::exception&) {
        return false;
    }
}

const std::string kFetchHint = "dataset CSV not present; see data/README.md";

struct DatasetRun {
    PipelineResult pipeline;
    double nam_auc = 0.0;  // NAM preset test metric (AUC or RMSE)
    PreparedData data;
};

double test_metric_for(const GgnamModel& model, const TabularDataset& test,
                       TaskKind task) {
    const Eigen::VectorXd scores = model.score_batch(test.X);
    const double m = accuracy_metric(task, scores, test.y);
    return task == TaskKind::regression ? -m : m;
}

DatasetRun run_dataset(const std::string& manifest_path, std::uint64_t seed,
                       bool with_nam) {
    const auto manifest = load_manifest(manifest_path);
    DatasetRun run;
    run.data = prepare(manifest, {0.2, 0.2, seed});
    SearchOptions options;
    options.fit = FitOptions::defaults_for(manifest.task);
    run.pipeline = fit_ggnam_pipeline(run.data.splits.train,
                                      run.data.splits.validation,
                                      run.data.splits.test, manifest.task,
                                      run.data.scaler, options, seed);
    if (with_nam) {
        const int p = run.data.splits.train.features();
        auto nam = fit(preset_partition(PresetKind::nam, p),
                       run.data.splits.train, run.data.splits.validation,
                       manifest.task, options.fit, run.data.scaler,
                       derive_seed(seed, "acceptance/nam"));
        run.nam_auc = test_metric_for(nam.model, run.data.splits.test,
                                      manifest.task);
    }
    return run;
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

// --- criterion 1 & 2: Taiwan credit ---------------------------------------

void criterion_taiwan(Tally& tally) {
    std::string manifest;
    if (!dataset_ready("taiwan", manifest)) {
        tally.report(1, "taiwan credit model quality", Outcome::skip, kFetchHint);
        tally.report(2, "taiwan credit structure", Outcome::skip, kFetchHint);
        return;
    }
    try {
        auto run = run_dataset(manifest, 1, /*with_nam=*/true);
        const auto& m = run.pipeline.metrics;
        const double lalr = m.at("lalr_test_auc");
        const double fcnn = m.at("fcnn_test_auc");
        const double ggnam = m.at("ggnam_test_auc");
        std::ostringstream detail;
        detail << "lalr=" << lalr << " fcnn=" << fcnn << " nam=" << run.nam_auc
               << " ggnam=" << ggnam;
        const bool ok = in_range(lalr, 0.70, 0.74) &&
                        in_range(fcnn, 0.74, 0.78) &&
                        in_range(run.nam_auc, 0.74, 0.78) &&
                        in_range(ggnam, 0.745, 0.785) && ggnam >= lalr + 0.02;
        tally.report(1, "taiwan credit model quality",
                     ok ? Outcome::pass : Outcome::fail, detail.str());

        int structure_hits = 0;
        bool any_groups = false;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto r = seed == 1 ? std::move(run) : run_dataset(manifest, seed, false);
            std::vector<int> v = r.pipeline.selection.nonlinear;
            std::vector<int> sorted_v = v;
            std::sort(sorted_v.begin(), sorted_v.end());
            if (sorted_v == std::vector<int>{1, 6} && v.front() == 6)
                ++structure_hits;
            for (const auto& g : r.pipeline.groups)
                if (g.size() > 1) any_groups = true;
        }
        std::ostringstream d2;
        d2 << structure_hits << "/5 seeds found V={6,1} in order; "
           << (any_groups ? "interaction groups reported" : "no interaction groups");
        tally.report(2, "taiwan credit structure",
                     (structure_hits >= 4 && !any_groups) ? Outcome::pass
                                                          : Outcome::fail,
                     d2.str());
    } catch (const std::exception& e) {
        tally.report(1, "taiwan credit model quality", Outcome::fail, e.what());
        tally.report(2, "taiwan credit structure", Outcome::fail, e.what());
    }
}

// --- criterion 3: Polish bankruptcy ---------------------------------------

void criterion_bankruptcy(Tally& tally) {
    std::string manifest;
    if (!dataset_ready("bankruptcy", manifest)) {
        tally.report(3, "bankruptcy quality and grouping", Outcome::skip,
                     kFetchHint);
        return;
    }
    try {
        int nam_below = 0;
        bool ranges_ok = true, grouping_ok = true, gap_ok = true;
        std::ostringstream detail;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto run = run_dataset(manifest, seed, /*with_nam=*/true);
            const auto& m = run.pipeline.metrics;
            const double lalr = m.at("lalr_test_auc");
            const double fcnn = m.at("fcnn_test_auc");
            const double ggnam = m.at("ggnam_test_auc");
            if (!in_range(fcnn, 0.87, 0.93) || !in_range(ggnam, 0.87, 0.93) ||
                !in_range(lalr, 0.64, 0.72))
                ranges_ok = false;
            if (ggnam - run.nam_auc >= 0.01) ++nam_below;

            std::vector<int> v = run.pipeline.selection.nonlinear;
            std::sort(v.begin(), v.end());
            const bool has_pair =
                std::binary_search(v.begin(), v.end(), 17) &&
                std::binary_search(v.begin(), v.end(), 22);
            bool joined = false;
            for (const auto& g : run.pipeline.groups)
                if (std::find(g.begin(), g.end(), 17) != g.end() &&
                    std::find(g.begin(), g.end(), 22) != g.end())
                    joined = true;
            if (!(has_pair && joined)) grouping_ok = false;

            if (run.pipeline.separability) {
                const auto& A = *run.pipeline.separability;
                auto pos = [&](int f) {
                    return static_cast<int>(
                        std::find(A.features.begin(), A.features.end(), f) -
                        A.features.begin());
                };
                if (has_pair) {
                    const double diag = A.A(pos(17), pos(17));
                    const double off = A.A(pos(17), pos(22));
                    if (std::abs((diag - off) - (0.913 - 0.881)) > 0.02)
                        gap_ok = false;
                    if (seed == 1)
                        detail << "diag=" << diag << " off=" << off << "; ";
                }
            }
        }
        detail << "nam below ggnam in " << nam_below << "/5 seeds";
        const bool ok = ranges_ok && grouping_ok && gap_ok && nam_below >= 3;
        tally.report(3, "bankruptcy quality and grouping",
                     ok ? Outcome::pass : Outcome::fail, detail.str());
    } catch (const std::exception& e) {
        tally.report(3, "bankruptcy quality and grouping", Outcome::fail,
                     e.what());
    }
}

// --- criterion 4: garment productivity ------------------------------------

void criterion_garment(Tally& tally) {
    std::string manifest;
    if (!dataset_ready("garment", manifest)) {
        tally.report(4, "garment quality and x9 shape", Outcome::skip,
                     kFetchHint);
        return;
    }
    try {
        int selection_hits = 0;
        bool ranges_ok = true, shape_ok = false;
        std::ostringstream detail;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto run = run_dataset(manifest, seed, /*with_nam=*/true);
            const auto& m = run.pipeline.metrics;
            const double lalr = m.at("lalr_test_rmse");
            const double fcnn = m.at("fcnn_test_rmse");
            const double ggnam = m.at("ggnam_test_rmse");
            if (!in_range(ggnam, 0.13, 0.15) || !in_range(fcnn, 0.13, 0.15) ||
                !in_range(run.nam_auc, 0.13, 0.15) ||
                !in_range(lalr, 0.145, 0.16))
                ranges_ok = false;
            if (run.pipeline.selection.nonlinear == std::vector<int>{9})
                ++selection_hits;

            if (seed == 1 &&
                !run.pipeline.selection.nonlinear.empty()) {
                // concave-increasing x9 response over training deciles
                const int col = 8;
                const auto& tr = run.data.splits.train;
                Eigen::VectorXd raw(tr.rows());
                for (int r = 0; r < tr.rows(); ++r)
                    raw(r) = tr.X(r, col) * run.data.scaler.std(col) +
                             run.data.scaler.mean(col);
                std::vector<double> sorted(raw.data(), raw.data() + raw.size());
                std::sort(sorted.begin(), sorted.end());
                std::vector<double> grid;
                for (int d = 0; d <= 10; ++d)
                    grid.push_back(sorted[std::min<std::size_t>(
                        sorted.size() - 1, d * (sorted.size() - 1) / 10)]);
                grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
                const auto shape = shape_function(run.pipeline.model, 9, grid);
                bool increasing = true, concave = true;
                std::vector<double> diffs;
                for (std::size_t i = 1; i < shape.size(); ++i)
                    diffs.push_back(shape[i] - shape[i - 1]);
                for (std::size_t i = 0; i < diffs.size(); ++i) {
                    if (diffs[i] <= 0) increasing = false;
                    if (i > 0 && diffs[i] > diffs[i - 1]) concave = false;
                }
                shape_ok = increasing && concave;
                detail << "shape increasing=" << increasing
                       << " concave=" << concave << "; ";
            }
        }
        detail << "selection exactly {9} in " << selection_hits << "/5 seeds";
        const bool ok = ranges_ok && selection_hits >= 4 && shape_ok;
        tally.report(4, "garment quality and x9 shape",
                     ok ? Outcome::pass : Outcome::fail, detail.str());
    } catch (const std::exception& e) {
        tally.report(4, "garment quality and x9 shape", Outcome::fail, e.what());
    }
}

// --- criterion 5: separability oracle suite -------------------------------

struct SeparabilityTrial {
    double diag = 0.0;
    double off = 0.0;
};

SeparabilityTrial run_separability_trial(
    const std::function<double(const Eigen::VectorXd&)>& f, std::uint64_t seed,
    bool strong) {
    // "strong" trains long enough that fit noise stays well under the 0.01
    // gap threshold; planted interactions produce drops orders of magnitude
    // larger, so those trials can train lighter.
    auto train = testing::make_regression(strong ? 2000 : 600, 4, f, 0.05, seed);
    auto validation =
        testing::make_regression(1000, 4, f, 0.05, seed + 900001);
    SearchOptions options;
    options.fit.subnet_hidden = {16};
    options.fit.activation = Activation::logistic;
    options.fit.defaults_applied = true;
    options.fit.optimizer.learning_rate = 2e-2;
    options.fit.schedule = {strong ? 1000 : 400, strong ? 100 : 40, 64, 0};
    options.workers = 1;
    options.restarts = strong ? 2 : 1;
    auto A = separability_matrix(train, validation, TaskKind::regression,
                                 {3, 4}, {1, 2}, options, seed);
    return {A.A(0, 0), A.A(0, 1)};
}

void criterion_separability(Tally& tally) {
    const auto start = std::chrono::steady_clock::now();
    const int trials = 100;
    std::vector<double> separable_gaps(trials), interaction_drops(trials);

    parallel_for(trials, default_worker_count(), [&](int t) {
        std::mt19937_64 rng(derive_seed(1000, "sep/dgp/" + std::to_string(t)));
        std::uniform_real_distribution<double> amp(0.5, 1.0);
        std::uniform_real_distribution<double> freq(0.8, 1.5);
        const double a = amp(rng), b = amp(rng);
        const double w1 = freq(rng), w2 = freq(rng);
        const int kind1 = static_cast<int>(rng() % 3);
        const int kind2 = static_cast<int>(rng() % 3);
        auto shape = [](int kind, double w, double x) {
            switch (kind) {
                case 0: return std::sin(w * x);
                case 1: return std::tanh(w * x);
                default: return std::min(x * x, 9.0) / 3.0;
            }
        };
        auto f = [=](const Eigen::VectorXd& x) {
            return a * shape(kind1, w1, x(0)) + b * shape(kind2, w2, x(1)) +
                   0.6 * x(2) - 0.4 * x(3);
        };
        auto r = run_separability_trial(f, rng(), /*strong=*/true);
        separable_gaps[t] = std::abs(r.diag - r.off);
    });

    parallel_for(trials, default_worker_count(), [&](int t) {
        std::mt19937_64 rng(derive_seed(2000, "int/dgp/" + std::to_string(t)));
        std::uniform_real_distribution<double> coeff(0.5, 1.5);
        const double c = coeff(rng);
        auto f = [=](const Eigen::VectorXd& x) {
            return c * x(0) * x(1) + 0.6 * x(2) - 0.4 * x(3);
        };
        auto r = run_separability_trial(f, rng(), /*strong=*/false);
        interaction_drops[t] = r.diag - r.off;
    });

    const double worst_gap =
        *std::max_element(separable_gaps.begin(), separable_gaps.end());
    const int detected = static_cast<int>(std::count_if(
        interaction_drops.begin(), interaction_drops.end(),
        [](double d) { return d > 0.01; }));
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::ostringstream detail;
    detail << "separable worst gap " << worst_gap << " (<0.01); interactions "
           << detected << "/100 detected (>=95); " << seconds << "s";
    const bool ok = worst_gap < 0.01 && detected >= 95 && seconds <= 600.0;
    tally.report(5, "separability oracle suite",
                 ok ? Outcome::pass : Outcome::fail, detail.str());
}

// --- criterion 6: gradient fidelity ---------------------------------------

void criterion_gradients(Tally& tally) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_net = 0.0, worst_composite = 0.0;

    for (int trial = 0; trial < 100; ++trial) {
        LayerSpec spec;
        spec.input_width = 2 + static_cast<int>(rng() % 7);
        const int depth = 1 + static_cast<int>(rng() % 2);
        for (int d = 0; d < depth; ++d)
            spec.hidden_widths.push_back(2 + static_cast<int>(rng() % 7));
        spec.activation = Activation::logistic;
        DenseNet net(spec, (trial % 3 == 0) ? 2e-4 : 0.0, rng());
        Eigen::MatrixXd X(12, spec.input_width);
        Eigen::VectorXd y(12);
        for (int r = 0; r < 12; ++r) {
            for (int c = 0; c < spec.input_width; ++c) X(r, c) = gauss(rng);
            y(r) = gauss(rng);
        }
        LossSpec loss{trial % 2 == 0 ? LossKind::mse
                                     : LossKind::binary_cross_entropy};
        if (loss.kind == LossKind::binary_cross_entropy)
            y = (y.array() > 0).cast<double>();
        worst_net = std::max(worst_net, gradient_check(net, X, y, loss, 1e-5));
    }

    for (int trial = 0; trial < 100; ++trial) {
        const int p = 3 + static_cast<int>(rng() % 4);
        std::vector<int> order(p);
        std::iota(order.begin(), order.end(), 1);
        std::shuffle(order.begin(), order.end(), rng);
        const int n_linear = static_cast<int>(rng() % p);
        std::vector<int> linear(order.begin(), order.begin() + n_linear);
        std::vector<int> rest(order.begin() + n_linear, order.end());
        std::vector<std::vector<int>> groups;
        if (!rest.empty()) {
            if (rest.size() >= 2 && rng() % 2) {
                const std::size_t cut = 1 + rng() % (rest.size() - 1);
                groups.push_back({rest.begin(), rest.begin() + cut});
                groups.push_back({rest.begin() + cut, rest.end()});
            } else {
                groups.push_back(rest);
            }
        }
        const TaskKind task = trial % 2 == 0 ? TaskKind::binary_classification
                                             : TaskKind::regression;
        GgnamModel model(make_partition(p, linear, groups),
                         link_for_task(task), {4}, Activation::logistic,
                         (trial % 5 == 0) ? 2e-4 : 0.0, rng());
        Eigen::MatrixXd X(10, p);
        Eigen::VectorXd y(10);
        for (int r = 0; r < 10; ++r) {
            for (int c = 0; c < p; ++c) X(r, c) = gauss(rng);
            y(r) = task == TaskKind::regression ? gauss(rng)
                                                : (gauss(rng) > 0 ? 1.0 : 0.0);
        }
        worst_composite = std::max(
            worst_composite,
            gradient_check(model, X, y, loss_for_task(task), 1e-5));
    }

    std::ostringstream detail;
    detail << "worst net " << worst_net << ", worst composite "
           << worst_composite << " (<1e-4)";
    tally.report(6, "gradient fidelity",
                 (worst_net < 1e-4 && worst_composite < 1e-4) ? Outcome::pass
                                                              : Outcome::fail,
                 detail.str());
}

// --- criterion 7: metric oracles ------------------------------------------

double auc_pair_counting(const Eigen::VectorXd& scores,
                         const Eigen::VectorXd& labels) {
    double wins = 0.0;
    long pairs = 0;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (labels(i) != 1.0) continue;
        for (Eigen::Index j = 0; j < scores.size(); ++j) {
            if (labels(j) != 0.0) continue;
            ++pairs;
            if (scores(i) > scores(j)) wins += 1.0;
            else if (scores(i) == scores(j)) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

void criterion_metric_oracles(Tally& tally) {
    std::mt19937_64 rng(47);
    std::uniform_int_distribution<int> size_dist(2, 200);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double worst_auc = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = size_dist(rng);
        Eigen::VectorXd scores(n), labels(n);
        for (int i = 0; i < n; ++i) {
            double s = unif(rng);
            if (unif(rng) < 0.25) s = std::round(s * 5.0) / 5.0;
            scores(i) = s;
            labels(i) = unif(rng) < 0.35 ? 1.0 : 0.0;
        }
        labels(0) = 1.0;
        labels(n - 1) = 0.0;
        worst_auc = std::max(
            worst_auc,
            std::abs(auc(scores, labels) - auc_pair_counting(scores, labels)));
    }

    const int n_rows = 25;
    Eigen::MatrixXd rows(n_rows, 3);
    for (int r = 0; r < n_rows; ++r)
        for (int c = 0; c < 3; ++c) rows(r, c) = gauss(rng);
    auto additive = [](const Eigen::VectorXd& x) {
        return std::sin(1.3 * x(0)) + std::tanh(x(1)) + 0.5 * x(2) * x(2);
    };
    const auto Ha = integrated_hessian(additive, rows, 1e-3);
    double max_entry = std::max(Ha.H.maxCoeff(), 1e-300);
    double worst_off = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) worst_off = std::max(worst_off, Ha.H(i, j));
    const bool additive_ok = worst_off < 1e-6 * max_entry;

    auto product = [](const Eigen::VectorXd& x) { return x(0) * x(1); };
    const auto Hp = integrated_hessian(product, rows, 1e-3);
    const double expected = std::sqrt(static_cast<double>(n_rows));
    const double rel = std::abs(Hp.H(0, 1) - expected) / expected;

    std::ostringstream detail;
    detail << "auc max err " << worst_auc << " (<=1e-12); additive off-diag "
           << (additive_ok ? "ok" : "too large") << "; product rel err " << rel
           << " (<=1e-6)";
    const bool ok = worst_auc <= 1e-12 && additive_ok && rel <= 1e-6;
    tally.report(7, "metric oracles", ok ? Outcome::pass : Outcome::fail,
                 detail.str());
}

// --- criterion 8: determinism ---------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void criterion_determinism(Tally& tally) {
    const char* cli = std::getenv("GGNAM_CLI");
    const fs::path root =
        fs::temp_directory_path() / "ggnam_acceptance_determinism";
    std::error_code ec;
    fs::remove_all(root, ec);
    fs::create_directories(root);

    // synthetic regression problem with one genuinely nonlinear feature
    auto ds = testing::make_regression(
        600, 3,
        [](const Eigen::VectorXd& x) {
            return std::sin(2.5 * x(0)) * 1.5 + 0.8 * x(1) - 0.5 * x(2);
        },
        0.05, 13);
    const fs::path csv = root / "toy.csv";
    {
        std::ofstream out(csv);
        out << "x1,x2,x3,target\n";
        for (int r = 0; r < ds.rows(); ++r)
            out << ds.X(r, 0) << "," << ds.X(r, 1) << "," << ds.X(r, 2) << ","
                << ds.y(r) << "\n";
    }
    const fs::path manifest = root / "toy.manifest";
    {
        std::ofstream out(manifest);
        out << "name = toy\npath = toy.csv\ntarget = target\n"
            << "task = regression\n";
    }

    bool ok = false;
    std::string detail;
    if (cli && fs::exists(cli)) {
        auto run = [&](const std::string& out_dir, int workers) {
            std::ostringstream cmd;
            cmd << '"' << cli << '"' << " discover --dataset " << manifest
                << " --seed 7 --workers " << workers << " --out "
                << (root / out_dir) << " > " << (root / (out_dir + ".log"))
                << " 2>&1";
            return std::system(cmd.str().c_str());
        };
        const int rc1 = run("run_w1", 1);
        const int rc1b = run("run_w1_again", 1);
        const int rc4 = run("run_w4", 4);
        if (rc1 == 0 && rc1b == 0 && rc4 == 0) {
            ok = true;
            for (const char* file : {"report.txt", "metrics.json",
                                     "selection_trace.json"}) {
                const std::string a = slurp(root / "run_w1" / file);
                const std::string b = slurp(root / "run_w1_again" / file);
                const std::string c = slurp(root / "run_w4" / file);
                if (a.empty() || a != b || a != c) {
                    ok = false;
                    detail = std::string(file) + " differs across runs";
                }
            }
            if (ok) detail = "cli artifacts byte-identical at workers 1 and 4";
        } else {
            detail = "cli discover run failed";
        }
    } else {
        // library-level fallback when the binary location is not provided
        auto splits = split(ds, {0.2, 0.2, 7});
        auto once = [&](int workers) {
            SearchOptions options;
            options.fit = FitOptions::defaults_for(TaskKind::regression);
            options.workers = workers;
            auto r = fit_ggnam_pipeline(splits.train, splits.validation,
                                        splits.test, TaskKind::regression, {},
                                        options, 7);
            std::ostringstream s;
            s << r.architecture_report << "\n";
            for (const auto& [k, v] : r.metrics)
                s << k << "=" << std::hexfloat << v << "\n";
            return s.str();
        };
        const std::string a = once(1), b = once(1), c = once(4);
        ok = a == b && a == c;
        detail = ok ? "pipeline artifacts identical at workers 1 and 4"
                    : "pipeline artifacts differ across runs";
    }
    fs::remove_all(root, ec);
    tally.report(8, "determinism", ok ? Outcome::pass : Outcome::fail, detail);
}

}  // namespace

int main() {
    Tally tally;
    criterion_taiwan(tally);
    criterion_bankruptcy(tally);
    criterion_garment(tally);
    criterion_separability(tally);
    criterion_gradients(tally);
    criterion_metric_oracles(tally);
    criterion_determinism(tally);
    if (tally.failures > 0) {
        std::cout << tally.failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all runnable criteria passed" << std::endl;
    return 0;
}
