#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iotids/dataset.hpp"
#include "iotids/feature_select.hpp"
#include "iotids/metrics.hpp"
#include "iotids/models.hpp"
#include "iotids/preprocess.hpp"
#include "iotids/sampling.hpp"

namespace iotids {

struct PipelineConfig {
    std::string data_path;
    std::string target_column = "Attack_type";
    std::vector<std::string> categorical_columns = {"proto", "service"};
    // "paper-order" fits outlier stats, the standardizer and RFE on the full
    // dataset before splitting; "leak-free" fits them on the training split
    // only and applies them to test.
    std::string mode = "paper-order";
    double z_threshold = 3.0;
    double test_fraction = 0.2;
    int rfe_k = 20;
    int rfe_step = 1;
    std::int64_t rfe_ranking_subsample = 20000;
    std::int64_t resample_target = 10000;
    int k_neighbors = 5;
    int cv_folds = 5;
    // subset of {"rf", "knn", "logreg", "mlp", "voting"}
    std::vector<std::string> models = {"rf", "knn", "logreg", "mlp", "voting"};
    std::uint64_t seed = 42;
    std::string output_dir = "out";
    bool learning_curves = false;
    std::vector<double> curve_fractions = {0.1, 0.2, 0.3, 0.4, 0.5,
                                           0.6, 0.7, 0.8, 0.9, 1.0};

    void validate() const;  // throws UsageError
};

PipelineConfig load_config(const std::string& path);

struct ModelRecord {
    std::string name;
    double train_accuracy = 0.0;
    double training_time_s = 0.0;
    double cv_score = 0.0;       // mean CV accuracy of the selected spec
    double test_accuracy = 0.0;
    double test_auc = 0.0;
    double kappa = 0.0;
    MetricReport test_metrics;
    ConfusionMatrix cm;
    std::string cm_file;
    std::string model_file;
};

struct PreprocessSummary {
    std::int64_t rows_loaded = 0;
    OutlierReport outliers;
    std::vector<std::string> class_names;
    std::vector<std::int64_t> class_counts_after_filter;
    std::vector<std::string> selected_features;
    std::vector<std::int64_t> train_counts_before_balancing;
    std::vector<std::int64_t> train_counts_after_balancing;
};

struct EvaluationReport {
    PipelineConfig config;
    PreprocessSummary preprocessing;
    std::vector<ModelRecord> models;
    std::string version;
};

// Runs encode -> outlier removal -> standardize -> RFE -> split -> hybrid
// resample (train only) -> grid search + fit -> evaluate on the untouched
// test split. Writes report.json, cm_<model>.csv, model_<model>.json,
// preprocessor.json and test_set.json under config.output_dir.
EvaluationReport run_pipeline(const PipelineConfig& config);

// `include_timing = false` drops wall-clock fields so two runs of the same
// config compare byte-identical.
std::string report_to_json_string(const EvaluationReport& report, bool include_timing = true);

struct LearningCurvePoint {
    double fraction;
    double train_accuracy;
    double cv_accuracy;
};

std::vector<LearningCurvePoint> learning_curve(const ModelSpec& spec, const Dataset& ds,
                                               const std::vector<double>& fractions, int folds,
                                               std::uint64_t seed);

// Everything needed to score raw CSV rows with a saved model: encoders,
// standardizer and the selected column subset.
struct FittedPreprocessor {
    std::vector<std::string> feature_names;  // full set, pre-selection
    std::map<std::string, LabelEncoder> feature_encoders;
    LabelEncoder target_encoder;
    Standardizer standardizer;
    std::vector<int> selected_columns;

    Eigen::MatrixXd transform(const RawTable& table) const;
};

void save_preprocessor(const FittedPreprocessor& p, const std::string& path);
FittedPreprocessor load_preprocessor(const std::string& path);

// The shared preprocessing stages: encode -> outliers -> standardize -> RFE
// -> split -> hybrid resample (train only), honoring config.mode.
struct PreparedData {
    Dataset balanced_train;
    Dataset test;
    PreprocessSummary summary;
    FittedPreprocessor preprocessor;
};

PreparedData prepare_data(const PipelineConfig& config);

// Default hyperparameter grid per family ("rf", "knn", "logreg", "mlp",
// "voting"); the forest is fixed at its published defaults.
std::vector<ModelSpec> default_grid(const std::string& family, std::uint64_t seed);

// If `path` does not exist and IOTIDS_DATA_DIR is set, look there.
std::string resolve_data_path(const std::string& path);

// Recomputes every test metric in <outdir>/report.json from the persisted
// model files and test set; throws NumericError if anything drifts beyond
// 1e-9.
void audit_run(const std::string& outdir);

}  // namespace iotids
