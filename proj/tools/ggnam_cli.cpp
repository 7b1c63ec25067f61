// ggnam command line: train single models, discover architectures, export
// explanation data. Artifacts land in a run directory as CSV/JSON/text.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ggnam/additive.hpp"
#include "ggnam/data.hpp"
#include "ggnam/jobs.hpp"
#include "ggnam/metrics.hpp"
#include "ggnam/search.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;

struct RunConfig {
    std::string manifest_path;
    std::string model_kind = "ggnam";
    std::string partition_file;
    std::string model_file;  // explain input
    std::string out_dir;
    std::string out_root = "runs";
    std::uint64_t seed = 0;
    int workers = 0;
    bool force = false;
    double epsilon_select = std::numeric_limits<double>::quiet_NaN();
    double epsilon_group = std::numeric_limits<double>::quiet_NaN();
    std::vector<int> hidden;
    std::string activation;
    double l2_lambda = std::numeric_limits<double>::quiet_NaN();
    double learning_rate = 1e-3;
    int max_epochs = 500;
    int patience = 25;
    int batch_size = 128;
    // explain flags
    bool shapes = false;
    bool hessian = false;
    std::vector<int> jmp;
    int grid_points = 50;
};

void apply_env_overrides(RunConfig& cfg) {
    if (const char* root = std::getenv("GGNAM_OUT_ROOT"); root && cfg.out_dir.empty())
        cfg.out_root = root;
    if (const char* w = std::getenv("GGNAM_WORKERS"); w && cfg.workers == 0)
        cfg.workers = std::atoi(w);
}

fs::path resolve_run_dir(const RunConfig& cfg) {
    fs::path dir;
    if (!cfg.out_dir.empty()) {
        dir = cfg.out_dir;
    } else {
        const auto now = std::chrono::system_clock::now();
        const auto t = std::chrono::system_clock::to_time_t(now);
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", std::localtime(&t));
        dir = fs::path(cfg.out_root) /
              ("run-" + std::string(stamp) + "-seed" + std::to_string(cfg.seed));
    }
    if (fs::exists(dir) && !fs::is_empty(dir) && !cfg.force)
        throw std::invalid_argument("run directory " + dir.string() +
                                    " exists; pass --force to reuse");
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

json config_echo(const RunConfig& cfg, const std::string& command) {
    json j;
    j["command"] = command;
    j["dataset"] = cfg.manifest_path;
    j["model"] = cfg.model_kind;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["epsilon_select"] = cfg.epsilon_select;
    j["epsilon_group"] = cfg.epsilon_group;
    j["hidden"] = cfg.hidden;
    j["activation"] = cfg.activation;
    j["l2_lambda"] = cfg.l2_lambda;
    j["learning_rate"] = cfg.learning_rate;
    j["max_epochs"] = cfg.max_epochs;
    j["patience"] = cfg.patience;
    j["batch_size"] = cfg.batch_size;
    return j;
}

ggnam::FitOptions fit_options(const RunConfig& cfg, ggnam::TaskKind task) {
    ggnam::FitOptions opts = ggnam::FitOptions::defaults_for(task);
    if (!cfg.hidden.empty()) opts.subnet_hidden = cfg.hidden;
    if (!cfg.activation.empty())
        opts.activation = ggnam::activation_from_string(cfg.activation);
    if (std::isfinite(cfg.l2_lambda)) opts.l2_lambda = cfg.l2_lambda;
    opts.optimizer.learning_rate = cfg.learning_rate;
    opts.schedule.max_epochs = cfg.max_epochs;
    opts.schedule.patience = cfg.patience;
    opts.schedule.batch_size = cfg.batch_size;
    return opts;
}

json provenance_json(const ggnam::PreparedData& data) {
    json j;
    j["train_rows"] = data.splits.train.rows();
    j["validation_rows"] = data.splits.validation.rows();
    j["test_rows"] = data.splits.test.rows();
    j["features"] = data.splits.train.feature_names;
    j["imputed_cells"] = data.imputed_cells;
    j["pruned_features"] = data.pruned_features;
    return j;
}

ggnam::PartitionSpec partition_for(const RunConfig& cfg, int p) {
    if (cfg.model_kind == "custom" || cfg.model_kind == "ggnam") {
        if (cfg.partition_file.empty())
            throw std::invalid_argument("--model " + cfg.model_kind +
                                        " requires --partition <file>");
        std::ifstream in(cfg.partition_file);
        if (!in)
            throw std::invalid_argument("cannot open partition file " +
                                        cfg.partition_file);
        json j = json::parse(in);
        return ggnam::make_partition(p, j.at("linear").get<std::vector<int>>(),
                                     j.at("groups").get<std::vector<std::vector<int>>>());
    }
    return ggnam::preset_partition(ggnam::preset_from_string(cfg.model_kind), p);
}

double metric_value(ggnam::TaskKind task, const Eigen::VectorXd& scores,
                    const Eigen::VectorXd& targets) {
    return task == ggnam::TaskKind::regression
               ? ggnam::rmse(scores, targets)
               : ggnam::auc(scores, targets);
}

// the manifest is configuration: failure to read it is a config error (2),
// failures against the data file itself are data errors (3)
ggnam::DatasetManifest load_manifest_or_config_error(const std::string& path) {
    try {
        return ggnam::load_manifest(path);
    } catch (const ggnam::LoadError& e) {
        throw std::invalid_argument(e.what());
    }
}

int cmd_train(RunConfig cfg) {
    apply_env_overrides(cfg);
    const auto manifest = load_manifest_or_config_error(cfg.manifest_path);
    const fs::path dir = resolve_run_dir(cfg);
    write_file(dir / "config.json", config_echo(cfg, "train").dump(2));
    try {
        const auto data = ggnam::prepare(manifest, {0.2, 0.2, cfg.seed});
        write_file(dir / "provenance.json", provenance_json(data).dump(2));

        const auto part = partition_for(cfg, data.splits.train.features());
        const auto opts = fit_options(cfg, manifest.task);
        auto result = ggnam::fit(part, data.splits.train, data.splits.validation,
                                 manifest.task, opts, data.scaler, cfg.seed);

        const std::string mname =
            manifest.task == ggnam::TaskKind::regression ? "rmse" : "auc";
        json metrics;
        metrics["model"] = cfg.model_kind;
        metrics["seed"] = cfg.seed;
        metrics["val_" + mname] = metric_value(
            manifest.task, result.model.score_batch(data.splits.validation.X),
            data.splits.validation.y);
        metrics["test_" + mname] =
            metric_value(manifest.task, result.model.score_batch(data.splits.test.X),
                         data.splits.test.y);
        write_file(dir / "model.json", ggnam::model_to_json(result.model));
        write_file(dir / "metrics.json", metrics.dump(2));
        std::cout << metrics.dump(2) << "\n";
        return 0;
    } catch (const ggnam::TrainingDivergedError& e) {
        write_file(dir / "FAILED", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const ggnam::LoadError& e) {
        write_file(dir / "FAILED", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

int cmd_discover(RunConfig cfg) {
    apply_env_overrides(cfg);
    const auto manifest = load_manifest_or_config_error(cfg.manifest_path);
    const fs::path dir = resolve_run_dir(cfg);
    write_file(dir / "config.json", config_echo(cfg, "discover").dump(2));
    try {
        const auto data = ggnam::prepare(manifest, {0.2, 0.2, cfg.seed});
        write_file(dir / "provenance.json", provenance_json(data).dump(2));

        ggnam::SearchOptions options;
        options.fit = fit_options(cfg, manifest.task);
        options.workers = cfg.workers;
        options.epsilon_select = cfg.epsilon_select;
        options.epsilon_group = cfg.epsilon_group;

        // persist each stage before the next one starts
        auto observer = [&](const std::string& stage, const std::string& payload) {
            if (stage == "selection")
                write_file(dir / "selection_trace.json", payload);
            else if (stage == "separability")
                write_file(dir / "separability.csv",
                           json::parse(payload).at("csv").get<std::string>());
            else if (stage == "final")
                write_file(dir / "report.txt",
                           json::parse(payload).at("report").get<std::string>());
            else
                write_file(dir / ("stage_" + stage + ".json"), payload);
        };

        auto result = ggnam::fit_ggnam_pipeline(
            data.splits.train, data.splits.validation, data.splits.test,
            manifest.task, data.scaler, options, cfg.seed, observer);

        write_file(dir / "model.json", ggnam::model_to_json(result.model));
        json metrics(result.metrics);
        metrics["seed"] = cfg.seed;
        write_file(dir / "metrics.json", metrics.dump(2));
        std::cout << result.architecture_report << "\n" << metrics.dump(2) << "\n";
        return 0;
    } catch (const ggnam::TrainingDivergedError& e) {
        write_file(dir / "FAILED", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitDiverged;
    } catch (const ggnam::LoadError& e) {
        write_file(dir / "FAILED", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

std::vector<double> feature_grid(const Eigen::VectorXd& col, int points) {
    const double lo = col.minCoeff(), hi = col.maxCoeff();
    std::vector<double> grid;
    for (int i = 0; i < points; ++i)
        grid.push_back(lo + (hi - lo) * i / (points - 1));
    return grid;
}

int cmd_explain(RunConfig cfg) {
    apply_env_overrides(cfg);
    const fs::path dir = resolve_run_dir(cfg);
    write_file(dir / "config.json", config_echo(cfg, "explain").dump(2));
    try {
        std::ifstream min(cfg.model_file);
        if (!min) throw ggnam::LoadError("cannot open model file " + cfg.model_file);
        std::stringstream buf;
        buf << min.rdbuf();
        const auto model = ggnam::model_from_json(buf.str());

        const auto manifest = ggnam::load_manifest(cfg.manifest_path);
        auto raw = ggnam::load_csv(manifest.path, manifest.target_column,
                                   manifest.task, manifest.missing_sentinels,
                                   manifest.drop_columns);
        // raw-unit rows; mean-impute so grids and perturbations stay finite
        std::vector<int> all_rows(raw.rows());
        std::iota(all_rows.begin(), all_rows.end(), 0);
        ggnam::impute_means(raw, all_rows);
        if (raw.features() != model.partition().p)
            throw ggnam::ShapeError("model expects " +
                                    std::to_string(model.partition().p) +
                                    " features, dataset has " +
                                    std::to_string(raw.features()));

        if (cfg.shapes) {
            const auto& part = model.partition();
            auto export_1d = [&](int feature) {
                const auto grid = feature_grid(raw.X.col(feature - 1), cfg.grid_points);
                const auto vals = ggnam::shape_function(model, feature, grid);
                std::ostringstream csv;
                csv << "feature,grid_value,contribution\n";
                for (std::size_t i = 0; i < grid.size(); ++i)
                    csv << "x" << feature << "," << grid[i] << "," << vals[i] << "\n";
                write_file(dir / ("shape_x" + std::to_string(feature) + ".csv"),
                           csv.str());
            };
            for (int u : part.linear) export_1d(u);
            for (std::size_t g = 0; g < part.groups.size(); ++g) {
                const auto& members = part.groups[g];
                if (members.size() == 1) {
                    export_1d(members[0]);
                    continue;
                }
                std::vector<std::vector<double>> grids;
                for (int m : members)
                    grids.push_back(feature_grid(raw.X.col(m - 1), cfg.grid_points));
                const auto vals = ggnam::group_shape(model, static_cast<int>(g), grids);
                std::ostringstream csv;
                for (std::size_t k = 0; k < members.size(); ++k)
                    csv << (k ? "," : "") << "x" << members[k];
                csv << ",contribution\n";
                std::vector<std::size_t> at(members.size(), 0);
                for (double v : vals) {
                    for (std::size_t k = 0; k < members.size(); ++k)
                        csv << (k ? "," : "") << grids[k][at[k]];
                    csv << "," << v << "\n";
                    std::size_t k = members.size();
                    while (k-- > 0) {
                        if (++at[k] < grids[k].size()) break;
                        at[k] = 0;
                    }
                }
                std::string name = "shape_group";
                for (int m : members) name += "_x" + std::to_string(m);
                write_file(dir / (name + ".csv"), csv.str());
            }
        }

        if (cfg.jmp.size() == 2) {
            const auto jm = ggnam::joint_marginal_matrix(raw, cfg.jmp[0], cfg.jmp[1]);
            std::ostringstream csv;
            for (int a = 0; a < jm.probabilities.rows(); ++a) {
                for (int b = 0; b < jm.probabilities.cols(); ++b)
                    csv << (b ? "," : "") << jm.probabilities(a, b);
                csv << "\n";
            }
            write_file(dir / ("jmp_x" + std::to_string(cfg.jmp[0]) + "_x" +
                              std::to_string(cfg.jmp[1]) + ".csv"),
                       csv.str());
        }

        if (cfg.hessian) {
            const Eigen::MatrixXd Z = model.scaler().empty()
                                          ? raw.X
                                          : model.scaler().transform(raw.X);
            auto f = [&](const Eigen::VectorXd& z) {
                return model.score_batch(z.transpose())(0);
            };
            const auto H = ggnam::integrated_hessian(f, Z, 1e-3);
            std::ostringstream csv;
            for (int a = 0; a < H.H.rows(); ++a) {
                for (int b = 0; b < H.H.cols(); ++b)
                    csv << (b ? "," : "") << H.H(a, b);
                csv << "\n";
            }
            write_file(dir / "hessian.csv", csv.str());
        }
        std::cout << "artifacts written to " << dir.string() << "\n";
        return 0;
    } catch (const ggnam::ShapeError& e) {
        write_file(dir / "FAILED", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ggnam::LoadError& e) {
        write_file(dir / "FAILED", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--dataset", cfg.manifest_path, "dataset manifest file")->required();
    cmd->add_option("--seed", cfg.seed, "base random seed");
    cmd->add_option("--out", cfg.out_dir, "run directory (default: runs/run-<stamp>-seed<seed>)");
    cmd->add_option("--workers", cfg.workers, "worker thread cap");
    cmd->add_flag("--force", cfg.force, "reuse an existing run directory");
    cmd->add_option("--hidden", cfg.hidden, "subnet hidden widths");
    cmd->add_option("--activation", cfg.activation, "logistic|relu|identity");
    cmd->add_option("--l2", cfg.l2_lambda, "l2 penalty coefficient");
    cmd->add_option("--lr", cfg.learning_rate, "learning rate");
    cmd->add_option("--max-epochs", cfg.max_epochs, "epoch cap");
    cmd->add_option("--patience", cfg.patience, "early stopping patience");
    cmd->add_option("--batch-size", cfg.batch_size, "minibatch size");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transparent additive neural models with architecture discovery"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* train = app.add_subcommand("train", "train one model preset");
    add_common(train, cfg);
    train->add_option("--model", cfg.model_kind, "lalr|fcnn|nam|ggnam|custom");
    train->add_option("--partition", cfg.partition_file,
                      "partition JSON for --model ggnam/custom");

    auto* discover = app.add_subcommand("discover", "run full architecture discovery");
    add_common(discover, cfg);
    discover->add_option("--epsilon-select", cfg.epsilon_select,
                         "stepwise stopping gap on the metric");
    discover->add_option("--epsilon-group", cfg.epsilon_group,
                         "interaction grouping gap on the metric");

    auto* explain = app.add_subcommand("explain", "export explanation CSVs");
    add_common(explain, cfg);
    explain->add_option("--model-file", cfg.model_file, "trained model JSON")->required();
    explain->add_flag("--shapes", cfg.shapes, "export shape-function CSVs");
    explain->add_flag("--hessian", cfg.hessian, "export integrated Hessian CSV");
    explain->add_option("--jmp", cfg.jmp, "two 1-based feature indices")->expected(2);
    explain->add_option("--grid-points", cfg.grid_points, "grid resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (train->parsed()) return cmd_train(cfg);
        if (discover->parsed()) return cmd_discover(cfg);
        if (explain->parsed()) return cmd_explain(cfg);
    } catch (const ggnam::PartitionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ggnam::LoadError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitConfig;
}
