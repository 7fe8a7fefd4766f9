// Command-line front end: pipeline, ingest-check, learning-curve, audit,
// predict. Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
// failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "iotids/errors.hpp"
#include "iotids/model_io.hpp"
#include "iotids/pipeline.hpp"

namespace fs = std::filesystem;
using namespace iotids;

namespace {

void print_report(const EvaluationReport& report) {
    std::printf("%-8s %10s %10s %10s %10s %10s %10s\n", "model", "train_acc", "cv_score",
                "test_acc", "auc", "kappa", "time_s");
    for (const auto& m : report.models)
        std::printf("%-8s %10.4f %10.4f %10.4f %10.4f %10.4f %10.2f\n", m.name.c_str(),
                    m.train_accuracy, m.cv_score, m.test_accuracy, m.test_auc, m.kappa,
                    m.training_time_s);
    std::printf("artifacts written to %s\n", report.config.output_dir.c_str());
}

int run(int argc, char** argv) {
    CLI::App app{"imbalanced IoT intrusion-detection pipeline"};
    app.require_subcommand(1);

    // shared config options, applied as overrides on top of --config
    std::string config_path, data_path, target, mode, outdir;
    std::vector<std::string> categoricals, model_names;
    std::uint64_t seed = 0;
    double test_fraction = 0.0, z_threshold = 0.0;
    int rfe_k = 0, k_neighbors = 0, cv_folds = 0;
    std::int64_t resample_target = 0;
    bool curves = false;
    std::vector<double> curve_fractions;

    auto add_config_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--data", data_path, "dataset CSV path");
        cmd->add_option("--target", target, "target column name");
        cmd->add_option("--categorical", categoricals, "categorical column names")
            ->delimiter(',');
        cmd->add_option("--mode", mode, "paper-order | leak-free");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--test-fraction", test_fraction, "test split fraction");
        cmd->add_option("--z-threshold", z_threshold, "outlier z-score threshold");
        cmd->add_option("--rfe-k", rfe_k, "RFE target feature count");
        cmd->add_option("--resample-target", resample_target, "per-class resample target");
        cmd->add_option("--k-neighbors", k_neighbors, "SMOTE neighbor count");
        cmd->add_option("--cv-folds", cv_folds, "cross-validation folds");
        cmd->add_option("--models", model_names, "model families to train")
            ->delimiter(',');
        cmd->add_option("--out", outdir, "output directory");
        cmd->add_option("--curve-fractions", curve_fractions,
                        "ascending training-set fractions in (0, 1]")
            ->delimiter(',');
    };

    auto build_config = [&](CLI::App* cmd) {
        PipelineConfig config;
        if (cmd->count("--config")) config = load_config(config_path);
        if (cmd->count("--data")) config.data_path = data_path;
        if (cmd->count("--target")) config.target_column = target;
        if (cmd->count("--categorical")) config.categorical_columns = categoricals;
        if (cmd->count("--mode")) config.mode = mode;
        if (cmd->count("--seed")) config.seed = seed;
        if (cmd->count("--test-fraction")) config.test_fraction = test_fraction;
        if (cmd->count("--z-threshold")) config.z_threshold = z_threshold;
        if (cmd->count("--rfe-k")) config.rfe_k = rfe_k;
        if (cmd->count("--resample-target")) config.resample_target = resample_target;
        if (cmd->count("--k-neighbors")) config.k_neighbors = k_neighbors;
        if (cmd->count("--cv-folds")) config.cv_folds = cv_folds;
        if (cmd->count("--models")) config.models = model_names;
        if (cmd->count("--out")) config.output_dir = outdir;
        if (cmd->count("--curve-fractions")) config.curve_fractions = curve_fractions;
        return config;
    };

    auto* pipeline_cmd = app.add_subcommand("pipeline", "run the full pipeline");
    add_config_options(pipeline_cmd);
    pipeline_cmd->add_flag("--learning-curves", curves, "emit learning-curve CSVs");

    auto* ingest_cmd = app.add_subcommand("ingest-check", "load the dataset and report counts");
    add_config_options(ingest_cmd);

    auto* curve_cmd = app.add_subcommand("learning-curve", "emit learning curves per model");
    add_config_options(curve_cmd);

    auto* audit_cmd = app.add_subcommand("audit", "recompute report metrics from artifacts");
    std::string audit_dir = "out";
    audit_cmd->add_option("--out", audit_dir, "pipeline output directory")->required();

    auto* predict_cmd = app.add_subcommand("predict", "batch-score a CSV with a saved model");
    std::string model_path, predict_csv, preprocessor_path, predict_out;
    predict_cmd->add_option("--model", model_path, "saved model JSON")->required();
    predict_cmd->add_option("--data", predict_csv, "CSV of rows to score")->required();
    predict_cmd->add_option("--preprocessor", preprocessor_path,
                            "preprocessor.json (raw-feature input)");
    predict_cmd->add_option("--output", predict_out, "predictions CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // app.exit prints help or the parse error; fold every parse failure
        // into the usage exit code
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (pipeline_cmd->parsed()) {
        PipelineConfig config = build_config(pipeline_cmd);
        if (pipeline_cmd->count("--learning-curves")) config.learning_curves = curves;
        print_report(run_pipeline(config));
        return 0;
    }

    if (ingest_cmd->parsed()) {
        const PipelineConfig config = build_config(ingest_cmd);
        config.validate();
        const auto table = load_dataset(resolve_data_path(config.data_path),
                                        config.target_column, config.categorical_columns);
        const auto enc = encode(table, config.target_column, config.categorical_columns);
        std::printf("rows: %zu\nfeature columns: %zu\nclasses: %d\n", table.n_rows(),
                    table.n_cols() - 1, enc.dataset.n_classes());
        const auto counts = enc.dataset.class_counts();
        for (std::size_t c = 0; c < counts.size(); ++c)
            std::printf("  %-40s %8lld\n", enc.dataset.class_names[c].c_str(),
                        static_cast<long long>(counts[c]));
        return 0;
    }

    if (curve_cmd->parsed()) {
        const PipelineConfig config = build_config(curve_cmd);
        const PreparedData data = prepare_data(config);
        fs::create_directories(config.output_dir);
        for (const auto& family : config.models) {
            const auto grid = default_grid(family, config.seed);
            const auto [spec, score] =
                grid_search(grid, data.balanced_train, config.cv_folds, config.seed);
            const auto curve = learning_curve(spec, data.balanced_train, config.curve_fractions,
                                              config.cv_folds, config.seed);
            const std::string path =
                (fs::path(config.output_dir) / ("curve_" + family + ".csv")).string();
            std::ofstream out(path);
            out << "fraction,train_accuracy,cv_accuracy\n";
            for (const auto& p : curve)
                out << p.fraction << ',' << p.train_accuracy << ',' << p.cv_accuracy << '\n';
            std::printf("%s written (cv score %.4f)\n", path.c_str(), score);
        }
        return 0;
    }

    if (audit_cmd->parsed()) {
        audit_run(audit_dir);
        std::printf("audit OK: report metrics match recomputation within 1e-9\n");
        return 0;
    }

    if (predict_cmd->parsed()) {
        const TrainedModel model = load_model(model_path);
        const RawTable table = load_table(resolve_data_path(predict_csv));

        Eigen::MatrixXd X;
        if (!preprocessor_path.empty()) {
            X = load_preprocessor(preprocessor_path).transform(table);
        } else {
            // input already carries the model's feature columns, standardized
            X.resize(static_cast<Eigen::Index>(table.n_rows()),
                     static_cast<Eigen::Index>(model.expected_features.size()));
            for (std::size_t j = 0; j < model.expected_features.size(); ++j) {
                const int col = table.column_index(model.expected_features[j]);
                if (col < 0)
                    throw DataError("input is missing feature column '" +
                                    model.expected_features[j] + "'");
                for (std::size_t i = 0; i < table.n_rows(); ++i) {
                    try {
                        X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                            std::stod(table.rows[i][static_cast<std::size_t>(col)]);
                    } catch (const std::exception&) {
                        throw DataError("cannot parse numeric cell at row " +
                                        std::to_string(i + 1) + ", column '" +
                                        model.expected_features[j] + "'");
                    }
                }
            }
        }

        const Eigen::MatrixXd proba = model.predict_proba(X);
        std::ofstream file;
        if (!predict_out.empty()) {
            file.open(predict_out);
            if (!file) throw DataError("cannot write " + predict_out);
        }
        std::ostream& out = predict_out.empty() ? std::cout : file;
        out << "predicted_class";
        for (const auto& name : model.class_names) out << ",p_" << name;
        out << '\n';
        for (Eigen::Index i = 0; i < proba.rows(); ++i) {
            int best = 0;
            for (int c = 1; c < proba.cols(); ++c)
                if (proba(i, c) > proba(i, best)) best = c;
            out << model.class_names[static_cast<std::size_t>(best)];
            for (Eigen::Index c = 0; c < proba.cols(); ++c) out << ',' << proba(i, c);
            out << '\n';
        }
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
