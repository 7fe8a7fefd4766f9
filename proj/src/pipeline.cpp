#include "iotids/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "iotids/errors.hpp"
#include "iotids/model_io.hpp"
#include "iotids/rng.hpp"
#include "json_util.hpp"

namespace fs = std::filesystem;

namespace iotids {

namespace {

using detail::json;

constexpr const char* kVersion = "0.1.0";

template <class F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const UsageError& e) {
        throw UsageError(name + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(name + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(name + ": " + e.what());
    }
}

Eigen::VectorXi argmax_rows(const Eigen::MatrixXd& proba) {
    Eigen::VectorXi labels(proba.rows());
    for (Eigen::Index i = 0; i < proba.rows(); ++i) {
        int best = 0;
        for (int c = 1; c < proba.cols(); ++c)
            if (proba(i, c) > proba(i, best)) best = c;
        labels[i] = best;
    }
    return labels;
}

}  // namespace

void PipelineConfig::validate() const {
    if (data_path.empty()) throw UsageError("data_path is required");
    if (mode != "paper-order" && mode != "leak-free")
        throw UsageError("mode must be 'paper-order' or 'leak-free', got '" + mode + "'");
    if (!(z_threshold > 0.0)) throw UsageError("z_threshold must be positive");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw UsageError("test_fraction must lie in (0, 1)");
    if (rfe_k < 1) throw UsageError("rfe_k must be >= 1");
    if (rfe_step < 1) throw UsageError("rfe_step must be >= 1");
    if (resample_target < 1) throw UsageError("resample_target must be >= 1");
    if (k_neighbors < 1) throw UsageError("k_neighbors must be >= 1");
    if (cv_folds < 2) throw UsageError("cv_folds must be >= 2");
    if (models.empty()) throw UsageError("at least one model family must be selected");
    for (const auto& m : models)
        if (m != "rf" && m != "knn" && m != "logreg" && m != "mlp" && m != "voting")
            throw UsageError("unknown model family '" + m + "'");
    if (output_dir.empty()) throw UsageError("output_dir is required");
    double prev = 0.0;
    for (double f : curve_fractions) {
        if (!(f > 0.0 && f <= 1.0) || f <= prev)
            throw UsageError("curve_fractions must be ascending values in (0, 1]");
        prev = f;
    }
}

std::string resolve_data_path(const std::string& path) {
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("IOTIDS_DATA_DIR")) {
        const fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate)) return candidate.string();
    }
    return path;
}

namespace {

json config_to_json(const PipelineConfig& c) {
    json j;
    j["data_path"] = c.data_path;
    j["target_column"] = c.target_column;
    j["categorical_columns"] = c.categorical_columns;
    j["mode"] = c.mode;
    j["z_threshold"] = c.z_threshold;
    j["test_fraction"] = c.test_fraction;
    j["rfe_k"] = c.rfe_k;
    j["rfe_step"] = c.rfe_step;
    j["rfe_ranking_subsample"] = c.rfe_ranking_subsample;
    j["resample_target"] = c.resample_target;
    j["k_neighbors"] = c.k_neighbors;
    j["cv_folds"] = c.cv_folds;
    j["models"] = c.models;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["learning_curves"] = c.learning_curves;
    j["curve_fractions"] = c.curve_fractions;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "data_path") c.data_path = value.get<std::string>();
        else if (key == "target_column") c.target_column = value.get<std::string>();
        else if (key == "categorical_columns")
            c.categorical_columns = value.get<std::vector<std::string>>();
        else if (key == "mode") c.mode = value.get<std::string>();
        else if (key == "z_threshold") c.z_threshold = value.get<double>();
        else if (key == "test_fraction") c.test_fraction = value.get<double>();
        else if (key == "rfe_k") c.rfe_k = value.get<int>();
        else if (key == "rfe_step") c.rfe_step = value.get<int>();
        else if (key == "rfe_ranking_subsample")
            c.rfe_ranking_subsample = value.get<std::int64_t>();
        else if (key == "resample_target") c.resample_target = value.get<std::int64_t>();
        else if (key == "k_neighbors") c.k_neighbors = value.get<int>();
        else if (key == "cv_folds") c.cv_folds = value.get<int>();
        else if (key == "models") c.models = value.get<std::vector<std::string>>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "output_dir") c.output_dir = value.get<std::string>();
        else if (key == "learning_curves") c.learning_curves = value.get<bool>();
        else if (key == "curve_fractions") c.curve_fractions = value.get<std::vector<double>>();
        else throw UsageError("unknown config key '" + key + "'");
    }
    return c;
}

}  // namespace

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("invalid config JSON: ") + e.what());
    }
    return config_from_json(j);
}

std::vector<ModelSpec> default_grid(const std::string& family, std::uint64_t seed) {
    if (family == "rf") {
        RfHyperParams p;
        p.seed = seed;
        return {ModelSpec::random_forest(p)};
    }
    if (family == "knn") {
        std::vector<ModelSpec> grid;
        for (int k : {3, 5, 7, 9}) grid.push_back(ModelSpec::knn_spec(k));
        return grid;
    }
    if (family == "logreg") {
        std::vector<ModelSpec> grid;
        for (double l2 : {1e-4, 1e-2}) {
            LogRegParams p;
            p.l2 = l2;
            grid.push_back(ModelSpec::logreg_spec(p));
        }
        return grid;
    }
    if (family == "mlp") {
        std::vector<ModelSpec> grid;
        for (int hidden : {50, 100}) {
            MlpParams p;
            p.hidden = hidden;
            grid.push_back(ModelSpec::mlp_spec(p));
        }
        return grid;
    }
    if (family == "voting") {
        RfHyperParams rf;
        rf.seed = seed;
        return {ModelSpec::soft_voting({ModelSpec::random_forest(rf), ModelSpec::knn_spec(5),
                                        ModelSpec::logreg_spec(), ModelSpec::mlp_spec()})};
    }
    throw UsageError("unknown model family '" + family + "'");
}

PreparedData prepare_data(const PipelineConfig& config) {
    config.validate();

    PreparedData out;
    const std::string path = resolve_data_path(config.data_path);

    const RawTable table = stage("load", [&] {
        return load_dataset(path, config.target_column, config.categorical_columns);
    });
    const EncodeResult enc = stage("encode", [&] {
        return encode(table, config.target_column, config.categorical_columns);
    });
    out.summary.rows_loaded = static_cast<std::int64_t>(table.n_rows());
    out.summary.class_names = enc.dataset.class_names;

    RfeOptions rfe_opts;
    rfe_opts.ranking_params.seed = config.seed;
    rfe_opts.step = config.rfe_step;
    rfe_opts.ranking_subsample = config.rfe_ranking_subsample;
    const int rfe_k = std::min<int>(config.rfe_k, static_cast<int>(enc.dataset.d()));

    Standardizer standardizer;
    FeatureSubset subset;
    Dataset train, test;

    if (config.mode == "paper-order") {
        auto [filtered, outlier_report] = stage("outlier-filter", [&] {
            return remove_outliers_zscore(enc.dataset, config.z_threshold);
        });
        out.summary.outliers = outlier_report;
        out.summary.class_counts_after_filter = filtered.class_counts();
        standardizer = fit_standardizer(filtered);
        const Dataset standardized = apply_standardizer(standardizer, filtered);
        subset = stage("rfe", [&] {
            return rfe_select(standardized, rfe_k, config.seed, rfe_opts);
        });
        const Dataset reduced = standardized.select_columns(subset.selected);
        SplitPair split = stage("split", [&] {
            return stratified_split(reduced, config.test_fraction, config.seed);
        });
        train = std::move(split.train);
        test = std::move(split.test);
    } else {  // leak-free: fit everything on the training split only
        SplitPair split = stage("split", [&] {
            return stratified_split(enc.dataset, config.test_fraction, config.seed);
        });
        auto [filtered, outlier_report] = stage("outlier-filter", [&] {
            return remove_outliers_zscore(split.train, config.z_threshold);
        });
        out.summary.outliers = outlier_report;
        out.summary.class_counts_after_filter = filtered.class_counts();
        standardizer = fit_standardizer(filtered);
        const Dataset ztrain = apply_standardizer(standardizer, filtered);
        const Dataset ztest = apply_standardizer(standardizer, split.test);
        subset = stage("rfe", [&] { return rfe_select(ztrain, rfe_k, config.seed, rfe_opts); });
        train = ztrain.select_columns(subset.selected);
        test = ztest.select_columns(subset.selected);
    }

    for (int col : subset.selected)
        out.summary.selected_features.push_back(enc.dataset.feature_names[static_cast<std::size_t>(col)]);

    out.summary.train_counts_before_balancing = train.class_counts();
    SamplingPlan plan;
    plan.target_per_class = config.resample_target;
    plan.k_neighbors = config.k_neighbors;
    plan.seed = config.seed;
    out.balanced_train = stage("resample", [&] { return hybrid_resample(train, plan); });
    out.summary.train_counts_after_balancing = out.balanced_train.class_counts();
    out.test = std::move(test);

    out.preprocessor.feature_names = enc.dataset.feature_names;
    out.preprocessor.feature_encoders = enc.feature_encoders;
    out.preprocessor.target_encoder = enc.target_encoder;
    out.preprocessor.standardizer = standardizer;
    out.preprocessor.selected_columns = subset.selected;
    return out;
}

namespace {

json metric_report_to_json(const MetricReport& r) {
    json j;
    j["accuracy"] = r.accuracy;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f1"] = r.f1;
    j["zero_division_precision"] = r.zero_division_precision;
    j["zero_division_recall"] = r.zero_division_recall;
    j["macro_precision"] = r.macro_precision;
    j["weighted_precision"] = r.weighted_precision;
    j["macro_recall"] = r.macro_recall;
    j["weighted_recall"] = r.weighted_recall;
    j["macro_f1"] = r.macro_f1;
    j["weighted_f1"] = r.weighted_f1;
    return j;
}

json cm_to_json(const ConfusionMatrix& cm) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) row.push_back(cm.counts(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_confusion_csv(const ConfusionMatrix& cm, const std::vector<std::string>& class_names,
                         const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "true\\predicted";
    for (const auto& name : class_names) out << ',' << name;
    out << '\n';
    for (Eigen::Index i = 0; i < cm.counts.rows(); ++i) {
        out << class_names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < cm.counts.cols(); ++j) out << ',' << cm.counts(i, j);
        out << '\n';
    }
}

void write_test_set(const Dataset& test, const std::string& path) {
    json j;
    j["format"] = "iotids-testset";
    j["feature_names"] = test.feature_names;
    j["class_names"] = test.class_names;
    j["X"] = detail::matrix_to_json(test.X);
    j["y"] = detail::ivector_to_json(test.y);
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump() << '\n';
}

Dataset read_test_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j;
    in >> j;
    if (!j.contains("format") || j["format"] != "iotids-testset")
        throw DataError(path + " is not a test-set file");
    Dataset ds;
    ds.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    ds.class_names = j.at("class_names").get<std::vector<std::string>>();
    ds.X = detail::matrix_from_json(j.at("X"),
                                    static_cast<Eigen::Index>(ds.feature_names.size()));
    ds.y = detail::ivector_from_json(j.at("y"));
    return ds;
}

int family_stream(const std::string& name) {
    if (name == "rf") return 1;
    if (name == "knn") return 2;
    if (name == "logreg") return 3;
    if (name == "mlp") return 4;
    return 5;  // voting
}

}  // namespace

std::string report_to_json_string(const EvaluationReport& report, bool include_timing) {
    json j;
    j["version"] = report.version;
    j["config"] = config_to_json(report.config);

    json pre;
    pre["rows_loaded"] = report.preprocessing.rows_loaded;
    pre["outlier_threshold"] = report.preprocessing.outliers.threshold;
    pre["rows_removed"] = report.preprocessing.outliers.rows_removed;
    json removed = json::object();
    for (const auto& [cls, count] : report.preprocessing.outliers.removed_per_class)
        removed[std::to_string(cls)] = count;
    pre["removed_per_class"] = std::move(removed);
    pre["class_names"] = report.preprocessing.class_names;
    pre["class_counts_after_filter"] = report.preprocessing.class_counts_after_filter;
    pre["selected_features"] = report.preprocessing.selected_features;
    pre["train_counts_before_balancing"] = report.preprocessing.train_counts_before_balancing;
    pre["train_counts_after_balancing"] = report.preprocessing.train_counts_after_balancing;
    j["preprocessing"] = std::move(pre);
    j["auc_scheme"] = "one-vs-rest, macro-averaged, rank-based";

    json models = json::array();
    for (const auto& m : report.models) {
        json rec;
        rec["name"] = m.name;
        rec["train_accuracy"] = m.train_accuracy;
        if (include_timing) rec["training_time_s"] = m.training_time_s;
        rec["cv_score"] = m.cv_score;
        rec["test_accuracy"] = m.test_accuracy;
        rec["test_auc"] = m.test_auc;
        rec["kappa"] = m.kappa;
        rec["test_metrics"] = metric_report_to_json(m.test_metrics);
        rec["confusion_matrix"] = cm_to_json(m.cm);
        rec["cm_file"] = m.cm_file;
        rec["model_file"] = m.model_file;
        models.push_back(std::move(rec));
    }
    j["models"] = std::move(models);
    return j.dump(2);
}

EvaluationReport run_pipeline(const PipelineConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);
    std::vector<std::string> written;

    try {
        EvaluationReport report;
        report.config = config;
        report.version = kVersion;

        PreparedData data = prepare_data(config);
        report.preprocessing = data.summary;

        const std::string pre_path = (fs::path(config.output_dir) / "preprocessor.json").string();
        save_preprocessor(data.preprocessor, pre_path);
        written.push_back(pre_path);
        const std::string test_path = (fs::path(config.output_dir) / "test_set.json").string();
        write_test_set(data.test, test_path);
        written.push_back(test_path);

        for (const auto& family : config.models) {
            ModelRecord record;
            record.name = family;

            const auto grid = default_grid(family, config.seed);
            auto [best_spec, cv_score] = stage("grid-search(" + family + ")", [&] {
                return grid_search(grid, data.balanced_train, config.cv_folds, config.seed);
            });
            record.cv_score = cv_score;

            const TrainedModel model = stage("fit(" + family + ")", [&] {
                return fit_classifier(best_spec, data.balanced_train,
                                      Rng::mix(config.seed, 0xF170 + family_stream(family)));
            });
            record.training_time_s = model.training_time_s;
            record.train_accuracy =
                accuracy_score(data.balanced_train.y, model.predict(data.balanced_train.X));

            const Eigen::MatrixXd proba = stage("evaluate(" + family + ")", [&] {
                return model.predict_proba(data.test.X);
            });
            const Eigen::VectorXi preds = argmax_rows(proba);
            record.cm = confusion_matrix(data.test.y, preds, data.test.n_classes());
            record.test_metrics = classification_report(record.cm);
            record.test_accuracy = record.test_metrics.accuracy;
            record.kappa = cohen_kappa(record.cm);
            record.test_auc = roc_auc_ovr_macro(data.test.y, proba);

            record.cm_file = "cm_" + family + ".csv";
            write_confusion_csv(record.cm, data.test.class_names,
                                (fs::path(config.output_dir) / record.cm_file).string());
            written.push_back((fs::path(config.output_dir) / record.cm_file).string());

            record.model_file = "model_" + family + ".json";
            save_model(model, (fs::path(config.output_dir) / record.model_file).string());
            written.push_back((fs::path(config.output_dir) / record.model_file).string());

            if (config.learning_curves) {
                const auto curve = learning_curve(best_spec, data.balanced_train,
                                                  config.curve_fractions, config.cv_folds,
                                                  config.seed);
                const std::string curve_path =
                    (fs::path(config.output_dir) / ("curve_" + family + ".csv")).string();
                std::ofstream out(curve_path);
                out << "fraction,train_accuracy,cv_accuracy\n";
                for (const auto& p : curve)
                    out << p.fraction << ',' << p.train_accuracy << ',' << p.cv_accuracy << '\n';
                written.push_back(curve_path);
            }

            report.models.push_back(std::move(record));
        }

        const std::string report_path = (fs::path(config.output_dir) / "report.json").string();
        std::ofstream out(report_path);
        if (!out) throw DataError("cannot write " + report_path);
        out << report_to_json_string(report) << '\n';
        return report;
    } catch (...) {
        for (const auto& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw;
    }
}

std::vector<LearningCurvePoint> learning_curve(const ModelSpec& spec, const Dataset& ds,
                                               const std::vector<double>& fractions, int folds,
                                               std::uint64_t seed) {
    ds.validate();
    double prev = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0) || f <= prev)
            throw UsageError("fractions must be ascending values in (0, 1]");
        prev = f;
    }

    std::vector<std::vector<Eigen::Index>> by_class(static_cast<std::size_t>(ds.n_classes()));
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        by_class[static_cast<std::size_t>(ds.y[i])].push_back(i);
    for (std::size_t cls = 0; cls < by_class.size(); ++cls) {
        Rng rng(Rng::mix(seed, 0xC0DE + cls));
        rng.shuffle(by_class[cls]);
    }

    std::vector<LearningCurvePoint> out;
    for (double f : fractions) {
        std::vector<Eigen::Index> rows;
        for (const auto& cls_rows : by_class) {
            if (cls_rows.empty()) continue;
            const std::size_t keep = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::floor(f * static_cast<double>(cls_rows.size()))));
            rows.insert(rows.end(), cls_rows.begin(),
                        cls_rows.begin() + static_cast<std::ptrdiff_t>(keep));
        }
        std::sort(rows.begin(), rows.end());
        const Dataset sub = ds.select_rows(rows);

        const TrainedModel model = fit_classifier(spec, sub, Rng::mix(seed, 0xF17));
        LearningCurvePoint point;
        point.fraction = f;
        point.train_accuracy = accuracy_score(sub.y, model.predict(sub.X));
        const auto scores = cross_validate(spec, sub, folds, seed);
        point.cv_accuracy =
            std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
        out.push_back(point);
    }
    return out;
}

// --- preprocessor persistence and application ---

Eigen::MatrixXd FittedPreprocessor::transform(const RawTable& table) const {
    const std::size_t n = table.n_rows();
    Eigen::MatrixXd full(static_cast<Eigen::Index>(n),
                         static_cast<Eigen::Index>(feature_names.size()));

    for (std::size_t j = 0; j < feature_names.size(); ++j) {
        const int col = table.column_index(feature_names[j]);
        if (col < 0)
            throw DataError("input is missing feature column '" + feature_names[j] + "'");
        const auto enc_it = feature_encoders.find(feature_names[j]);
        for (std::size_t i = 0; i < n; ++i) {
            const std::string& cell = table.rows[i][static_cast<std::size_t>(col)];
            double v = 0.0;
            if (enc_it != feature_encoders.end()) {
                v = static_cast<double>(enc_it->second.encode(cell));
            } else {
                auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
                if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
                    throw DataError("cannot parse numeric cell at row " + std::to_string(i + 1) +
                                    ", column '" + feature_names[j] + "': '" + cell + "'");
            }
            const double mu = standardizer.mean[static_cast<Eigen::Index>(j)];
            const double sigma = standardizer.std[static_cast<Eigen::Index>(j)];
            full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                sigma == 0.0 ? 0.0 : (v - mu) / sigma;
        }
    }

    Eigen::MatrixXd selected(full.rows(), static_cast<Eigen::Index>(selected_columns.size()));
    for (std::size_t j = 0; j < selected_columns.size(); ++j)
        selected.col(static_cast<Eigen::Index>(j)) = full.col(selected_columns[j]);
    return selected;
}

void save_preprocessor(const FittedPreprocessor& p, const std::string& path) {
    json j;
    j["format"] = "iotids-preprocessor";
    j["version"] = 1;
    j["feature_names"] = p.feature_names;
    json encoders = json::object();
    for (const auto& [name, enc] : p.feature_encoders) encoders[name] = enc.categories;
    j["feature_encoders"] = std::move(encoders);
    j["target_encoder"] = p.target_encoder.categories;
    j["mean"] = detail::vector_to_json(p.standardizer.mean);
    j["std"] = detail::vector_to_json(p.standardizer.std);
    j["selected_columns"] = p.selected_columns;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump() << '\n';
}

FittedPreprocessor load_preprocessor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError(std::string("corrupt preprocessor file: ") + e.what());
    }
    if (!j.contains("format") || j["format"] != "iotids-preprocessor")
        throw DataError(path + " is not a preprocessor file");

    FittedPreprocessor p;
    p.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& [name, cats] : j.at("feature_encoders").items()) {
        LabelEncoder enc;
        enc.categories = cats.get<std::vector<std::string>>();
        p.feature_encoders.emplace(name, std::move(enc));
    }
    p.target_encoder.categories = j.at("target_encoder").get<std::vector<std::string>>();
    p.standardizer.mean = detail::vector_from_json(j.at("mean"));
    p.standardizer.std = detail::vector_from_json(j.at("std"));
    p.selected_columns = j.at("selected_columns").get<std::vector<int>>();
    return p;
}

void audit_run(const std::string& outdir) {
    const std::string report_path = (fs::path(outdir) / "report.json").string();
    std::ifstream in(report_path);
    if (!in) throw DataError("cannot open " + report_path);
    json report;
    try {
        in >> report;
    } catch (const json::parse_error& e) {
        throw DataError(std::string("corrupt report: ") + e.what());
    }

    const Dataset test = read_test_set((fs::path(outdir) / "test_set.json").string());

    auto check = [](const std::string& what, double expected, double actual) {
        if (std::abs(expected - actual) > 1e-9)
            throw NumericError("audit mismatch in " + what + ": report " +
                               std::to_string(expected) + " vs recomputed " +
                               std::to_string(actual));
    };

    for (const auto& rec : report.at("models")) {
        const std::string name = rec.at("name").get<std::string>();
        const TrainedModel model =
            load_model((fs::path(outdir) / rec.at("model_file").get<std::string>()).string());

        const Eigen::MatrixXd proba = model.predict_proba(test.X);
        const Eigen::VectorXi preds = argmax_rows(proba);
        const ConfusionMatrix cm = confusion_matrix(test.y, preds, test.n_classes());
        const MetricReport metrics = classification_report(cm);

        check(name + ".test_accuracy", rec.at("test_accuracy").get<double>(), metrics.accuracy);
        check(name + ".kappa", rec.at("kappa").get<double>(), cohen_kappa(cm));
        check(name + ".test_auc", rec.at("test_auc").get<double>(),
              roc_auc_ovr_macro(test.y, proba));
        const json& tm = rec.at("test_metrics");
        check(name + ".macro_precision", tm.at("macro_precision").get<double>(),
              metrics.macro_precision);
        check(name + ".weighted_precision", tm.at("weighted_precision").get<double>(),
              metrics.weighted_precision);
        check(name + ".macro_recall", tm.at("macro_recall").get<double>(), metrics.macro_recall);
        check(name + ".weighted_recall", tm.at("weighted_recall").get<double>(),
              metrics.weighted_recall);
        check(name + ".macro_f1", tm.at("macro_f1").get<double>(), metrics.macro_f1);
        check(name + ".weighted_f1", tm.at("weighted_f1").get<double>(), metrics.weighted_f1);

        const json& cm_json = rec.at("confusion_matrix");
        for (Eigen::Index i = 0; i < cm.counts.rows(); ++i)
            for (Eigen::Index j = 0; j < cm.counts.cols(); ++j)
                if (cm_json.at(static_cast<std::size_t>(i))
                        .at(static_cast<std::size_t>(j))
                        .get<std::int64_t>() != cm.counts(i, j))
                    throw NumericError("audit mismatch in " + name + " confusion matrix at (" +
                                       std::to_string(i) + "," + std::to_string(j) + ")");
    }
}

}  // namespace iotids
