#include "ggnam/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace ggnam {

std::string to_string(TaskKind t) {
    return t == TaskKind::regression ? "regression" : "binary_classification";
}

TaskKind task_from_string(const std::string& s) {
    if (s == "regression") return TaskKind::regression;
    if (s == "binary_classification" || s == "classification")
        return TaskKind::binary_classification;
    throw InvalidSpecError("unknown task: " + s);
}

bool TabularDataset::has_missing() const {
    return !X.allFinite();
}

TabularDataset TabularDataset::subset(const std::vector<int>& row_indices) const {
    TabularDataset out;
    out.X.resize(static_cast<Eigen::Index>(row_indices.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(row_indices.size()));
    for (std::size_t k = 0; k < row_indices.size(); ++k) {
        out.X.row(static_cast<Eigen::Index>(k)) = X.row(row_indices[k]);
        out.y(static_cast<Eigen::Index>(k)) = y(row_indices[k]);
    }
    out.feature_names = feature_names;
    out.task = task;
    return out;
}

Eigen::VectorXd Scaler::transform(const Eigen::VectorXd& x) const {
    return ((x - mean).array() / std.array()).matrix();
}

Eigen::MatrixXd Scaler::transform(const Eigen::MatrixXd& X) const {
    return ((X.rowwise() - mean.transpose()).array().rowwise() /
            std.transpose().array())
        .matrix();
}

Eigen::VectorXd Scaler::inverse(const Eigen::VectorXd& z) const {
    return (z.array() * std.array()).matrix() + mean;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

// RFC-4180 style row parser with quoted fields
std::vector<std::string> parse_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open manifest: " + path);
    DatasetManifest m;
    m.missing_sentinels = {"", "NA", "?"};
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw LoadError("manifest line without '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "name") m.name = value;
        else if (key == "path") m.path = value;
        else if (key == "target") m.target_column = value;
        else if (key == "task") m.task = task_from_string(value);
        else if (key == "missing") m.missing_sentinels = split_list(value);
        else if (key == "drop") m.drop_columns = split_list(value);
        else if (key == "correlation_threshold") m.correlation_threshold = std::stod(value);
        else throw LoadError("unknown manifest key: " + key);
    }
    if (m.path.empty() || m.target_column.empty())
        throw LoadError("manifest must set path and target: " + path);
    // relative data paths resolve against the manifest location
    if (!m.path.empty() && m.path[0] != '/') {
        const auto slash = path.find_last_of('/');
        if (slash != std::string::npos) m.path = path.substr(0, slash + 1) + m.path;
    }
    return m;
}

TabularDataset load_csv(const std::string& path, const std::string& target_column,
                        TaskKind task,
                        const std::vector<std::string>& missing_sentinels,
                        const std::vector<std::string>& drop_columns) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open csv: " + path);
    std::string line;
    if (!std::getline(in, line)) throw LoadError("empty csv: " + path);
    const auto header = parse_csv_row(line);

    int target_idx = -1;
    std::vector<int> keep;
    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = trim(header[c]);
        if (name == target_column) {
            target_idx = static_cast<int>(c);
            continue;
        }
        if (std::find(drop_columns.begin(), drop_columns.end(), name) !=
            drop_columns.end())
            continue;
        keep.push_back(static_cast<int>(c));
        names.push_back(name);
    }
    if (target_idx < 0)
        throw LoadError("target column '" + target_column + "' not in " + path);

    auto is_missing = [&](const std::string& cell) {
        const std::string t = trim(cell);
        return std::find(missing_sentinels.begin(), missing_sentinels.end(), t) !=
               missing_sentinels.end();
    };

    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto cells = parse_csv_row(line);
        if (cells.size() != header.size())
            throw LoadError(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        auto parse_cell = [&](int c) {
            try {
                std::size_t pos = 0;
                const double v = std::stod(trim(cells[c]), &pos);
                if (pos != trim(cells[c]).size()) throw std::invalid_argument("trailing");
                return v;
            } catch (const std::exception&) {
                throw LoadError(path + ":" + std::to_string(lineno) +
                                ": unparseable cell in column '" + header[c] + "'");
            }
        };
        if (is_missing(cells[target_idx]))
            throw LoadError(path + ":" + std::to_string(lineno) + ": missing target");
        targets.push_back(parse_cell(target_idx));
        std::vector<double> row;
        row.reserve(keep.size());
        for (int c : keep)
            row.push_back(is_missing(cells[c])
                              ? std::numeric_limits<double>::quiet_NaN()
                              : parse_cell(c));
        rows.push_back(std::move(row));
    }

    TabularDataset ds;
    ds.task = task;
    ds.feature_names = names;
    ds.X.resize(static_cast<Eigen::Index>(rows.size()),
                static_cast<Eigen::Index>(keep.size()));
    ds.y.resize(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < keep.size(); ++c)
            ds.X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        ds.y(static_cast<Eigen::Index>(r)) = targets[r];
    }
    ds.provenance.push_back("loaded " + path + ": " + std::to_string(ds.rows()) +
                            " rows, " + std::to_string(ds.features()) + " features");
    return ds;
}

int impute_means(TabularDataset& dataset, const std::vector<int>& train_rows) {
    int imputed = 0;
    for (int c = 0; c < dataset.features(); ++c) {
        double sum = 0.0;
        int count = 0;
        for (int r : train_rows) {
            const double v = dataset.X(r, c);
            if (std::isfinite(v)) {
                sum += v;
                ++count;
            }
        }
        if (count == 0)
            throw LoadError("impute_means: column '" + dataset.feature_names[c] +
                            "' fully missing in training rows");
        const double mean = sum / count;
        for (int r = 0; r < dataset.rows(); ++r) {
            if (!std::isfinite(dataset.X(r, c))) {
                dataset.X(r, c) = mean;
                ++imputed;
            }
        }
    }
    if (imputed > 0)
        dataset.provenance.push_back("imputed " + std::to_string(imputed) +
                                     " cells with training means");
    return imputed;
}

namespace {

double pearson(const Eigen::MatrixXd& X, int a, int b,
               const std::vector<int>& rows) {
    double ma = 0, mb = 0;
    for (int r : rows) {
        ma += X(r, a);
        mb += X(r, b);
    }
    const double n = static_cast<double>(rows.size());
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (int r : rows) {
        const double da = X(r, a) - ma;
        const double db = X(r, b) - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va <= 0 || vb <= 0) return 0.0;
    return cov / std::sqrt(va * vb);
}

}  // namespace

std::vector<std::string> prune_correlated(TabularDataset& dataset,
                                          double threshold,
                                          const std::vector<int>& train_rows) {
    if (dataset.has_missing())
        throw InvalidInputError("prune_correlated: dataset has missing values");
    std::vector<int> retained;
    std::vector<int> dropped;
    std::vector<std::string> removed_log;
    for (int c = 0; c < dataset.features(); ++c) {
        bool drop = false;
        for (int kept : retained) {
            const double r = pearson(dataset.X, kept, c, train_rows);
            if (std::abs(r) > threshold) {
                drop = true;
                removed_log.push_back(dataset.feature_names[c]);
                dataset.provenance.push_back(
                    "pruned " + dataset.feature_names[c] + " (r=" +
                    std::to_string(r) + " with " + dataset.feature_names[kept] + ")");
                break;
            }
        }
        (drop ? dropped : retained).push_back(c);
    }
    if (!dropped.empty()) {
        Eigen::MatrixXd nx(dataset.rows(), static_cast<Eigen::Index>(retained.size()));
        std::vector<std::string> names;
        for (std::size_t k = 0; k < retained.size(); ++k) {
            nx.col(static_cast<Eigen::Index>(k)) = dataset.X.col(retained[k]);
            names.push_back(dataset.feature_names[retained[k]]);
        }
        dataset.X = std::move(nx);
        dataset.feature_names = std::move(names);
    }
    return removed_log;
}

SplitIndices split_indices(int rows, const SplitSpec& spec) {
    if (rows < 10) throw InvalidInputError("split: need at least 10 rows");
    if (spec.test_fraction <= 0 || spec.test_fraction >= 1 ||
        spec.validation_fraction_of_train <= 0 ||
        spec.validation_fraction_of_train >= 1)
        throw InvalidSpecError("split: fractions must lie in (0,1)");
    std::vector<int> order(rows);
    for (int i = 0; i < rows; ++i) order[i] = i;
    std::mt19937_64 rng(spec.seed);
    std::shuffle(order.begin(), order.end(), rng);

    const int n_test = static_cast<int>(std::llround(rows * spec.test_fraction));
    const int n_trainval = rows - n_test;
    const int n_val =
        static_cast<int>(std::llround(n_trainval * spec.validation_fraction_of_train));

    SplitIndices out;
    out.test.assign(order.begin(), order.begin() + n_test);
    out.validation.assign(order.begin() + n_test, order.begin() + n_test + n_val);
    out.train.assign(order.begin() + n_test + n_val, order.end());
    return out;
}

Splits split(const TabularDataset& dataset, const SplitSpec& spec) {
    Splits out;
    out.indices = split_indices(dataset.rows(), spec);
    out.train = dataset.subset(out.indices.train);
    out.validation = dataset.subset(out.indices.validation);
    out.test = dataset.subset(out.indices.test);
    return out;
}

Scaler standardize(TabularDataset& train, TabularDataset& validation,
                   TabularDataset& test) {
    const int p = train.features();
    Scaler s;
    s.mean.resize(p);
    s.std.resize(p);
    s.median.resize(p);
    s.constant.assign(p, false);
    const double n = static_cast<double>(train.rows());
    for (int c = 0; c < p; ++c) {
        s.mean(c) = train.X.col(c).mean();
        const double var = (train.X.col(c).array() - s.mean(c)).square().sum() / n;
        if (var <= 1e-24) {
            s.constant[c] = true;
            s.std(c) = 1.0;
        } else {
            s.std(c) = std::sqrt(var);
        }
        std::vector<double> col(train.X.col(c).data(),
                                train.X.col(c).data() + train.rows());
        std::nth_element(col.begin(), col.begin() + col.size() / 2, col.end());
        s.median(c) = col[col.size() / 2];
    }
    train.X = s.transform(train.X);
    validation.X = s.transform(validation.X);
    test.X = s.transform(test.X);
    return s;
}

PreparedData prepare(const DatasetManifest& manifest, const SplitSpec& spec) {
    TabularDataset raw = load_csv(manifest.path, manifest.target_column,
                                  manifest.task, manifest.missing_sentinels,
                                  manifest.drop_columns);
    PreparedData out;
    auto indices = split_indices(raw.rows(), spec);
    out.imputed_cells = impute_means(raw, indices.train);
    if (manifest.correlation_threshold > 0)
        out.pruned_features =
            prune_correlated(raw, manifest.correlation_threshold, indices.train);
    out.splits.indices = indices;
    out.splits.train = raw.subset(indices.train);
    out.splits.validation = raw.subset(indices.validation);
    out.splits.test = raw.subset(indices.test);
    out.scaler =
        standardize(out.splits.train, out.splits.validation, out.splits.test);
    return out;
}

}  // namespace ggnam
