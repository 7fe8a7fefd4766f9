#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "iotids/errors.hpp"
#include "iotids/pipeline.hpp"
#include "iotids/rng.hpp"
#include "test_util.hpp"

using namespace iotids;
using testutil::make_blobs;
using testutil::TempDir;
using testutil::TempFile;
namespace fs = std::filesystem;

namespace {

// CSV with four informative numeric features, one categorical column and a
// three-class target; class means are well separated
std::string make_csv(const std::vector<int>& counts, std::uint64_t seed) {
    const char* labels[] = {"attack", "normal", "scan"};
    const char* protos[] = {"tcp", "udp"};
    Rng rng(seed);
    std::ostringstream out;
    out << "f0,f1,f2,f3,proto,label\n";
    for (std::size_t c = 0; c < counts.size(); ++c)
        for (int i = 0; i < counts[c]; ++i) {
            const double base = 4.0 * static_cast<double>(c);
            out << base + rng.normal() << ',' << -base + rng.normal() << ','
                << rng.normal() << ',' << rng.normal() << ','
                << protos[rng.below(2)] << ',' << labels[c] << '\n';
        }
    return out.str();
}

PipelineConfig small_config(const std::string& data_path, const std::string& outdir) {
    PipelineConfig c;
    c.data_path = data_path;
    c.target_column = "label";
    c.categorical_columns = {"proto"};
    c.rfe_k = 3;
    c.resample_target = 30;
    c.cv_folds = 3;
    c.models = {"rf", "knn", "logreg"};
    c.output_dir = outdir;
    return c;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return std::string(std::istreambuf_iterator<char>(in), {});
}
}  // namespace

TEST_CASE("run_pipeline produces a complete, balanced, auditable run") {
    TempFile csv(make_csv({90, 60, 30}, 11));
    TempDir out;
    const auto config = small_config(csv.path(), out.str());
    const auto report = run_pipeline(config);

    // artifacts on disk
    for (const char* name : {"report.json", "preprocessor.json", "test_set.json", "cm_rf.csv",
                             "model_rf.json", "cm_knn.csv", "model_knn.json", "cm_logreg.csv",
                             "model_logreg.json"})
        CHECK(fs::exists(out.path() / name));

    // balanced training counts
    CHECK(report.preprocessing.train_counts_after_balancing ==
          std::vector<std::int64_t>{30, 30, 30});
    CHECK(report.preprocessing.selected_features.size() == 3);
    CHECK(report.preprocessing.class_names ==
          std::vector<std::string>{"attack", "normal", "scan"});

    REQUIRE(report.models.size() == 3);
    for (const auto& m : report.models) {
        CHECK(m.test_accuracy > 0.8);  // trivially separable geometry
        CHECK(m.test_auc > 0.9);
        CHECK(m.cm.counts.sum() > 0);
    }

    // the persisted run audits clean
    CHECK_NOTHROW(audit_run(out.str()));

    // tampering with a reported metric is caught
    const fs::path report_path = out.path() / "report.json";
    auto doc = nlohmann::json::parse(slurp(report_path));
    doc["models"][0]["test_accuracy"] = doc["models"][0]["test_accuracy"].get<double>() - 0.25;
    std::ofstream(report_path) << doc.dump(2);
    CHECK_THROWS_AS(audit_run(out.str()), NumericError);
}

TEST_CASE("two identical runs are byte-identical apart from timing") {
    TempFile csv(make_csv({60, 40, 20}, 23));
    TempDir out;
    auto config = small_config(csv.path(), out.str());
    config.models = {"rf", "knn"};

    const auto first = run_pipeline(config);
    const std::string first_report = report_to_json_string(first, false);
    const std::string first_rf = slurp(out.path() / "model_rf.json");
    const std::string first_knn = slurp(out.path() / "model_knn.json");

    const auto second = run_pipeline(config);
    CHECK(report_to_json_string(second, false) == first_report);
    CHECK(slurp(out.path() / "model_rf.json") == first_rf);
    CHECK(slurp(out.path() / "model_knn.json") == first_knn);

    // timing fields may differ, so the timed variants need not match
    CHECK(report_to_json_string(first, true) != first_report);
}

TEST_CASE("paper-order and leak-free modes both run and differ") {
    TempFile csv(make_csv({60, 40, 20}, 31));
    TempDir out_a, out_b;
    auto a = small_config(csv.path(), out_a.str());
    a.models = {"knn"};
    auto b = a;
    b.mode = "leak-free";
    b.output_dir = out_b.str();

    const auto ra = run_pipeline(a);
    const auto rb = run_pipeline(b);
    CHECK(ra.models[0].test_accuracy > 0.8);
    CHECK(rb.models[0].test_accuracy > 0.8);
    // leak-free filters outliers on the training split only
    CHECK(std::accumulate(rb.preprocessing.class_counts_after_filter.begin(),
                          rb.preprocessing.class_counts_after_filter.end(), std::int64_t{0}) <=
          std::accumulate(ra.preprocessing.class_counts_after_filter.begin(),
                          ra.preprocessing.class_counts_after_filter.end(), std::int64_t{0}));
}

TEST_CASE("failed runs remove their partial outputs") {
    // single-class data: logistic regression cannot be fit
    std::ostringstream csv_text;
    csv_text << "f0,f1,label\n";
    Rng rng(3);
    for (int i = 0; i < 40; ++i) csv_text << rng.normal() << ',' << rng.normal() << ",only\n";
    TempFile csv(csv_text.str());
    TempDir out;
    auto config = small_config(csv.path(), out.str());
    config.categorical_columns = {};
    config.models = {"logreg"};
    config.rfe_k = 2;
    config.resample_target = 10;

    CHECK_THROWS_AS(run_pipeline(config), DataError);
    CHECK_FALSE(fs::exists(out.path() / "preprocessor.json"));
    CHECK_FALSE(fs::exists(out.path() / "test_set.json"));
    CHECK_FALSE(fs::exists(out.path() / "report.json"));
}

TEST_CASE("learning curves are written when requested") {
    TempFile csv(make_csv({60, 40, 20}, 41));
    TempDir out;
    auto config = small_config(csv.path(), out.str());
    config.models = {"knn"};
    config.learning_curves = true;
    config.curve_fractions = {0.5, 1.0};
    run_pipeline(config);

    const std::string curve = slurp(out.path() / "curve_knn.csv");
    CHECK(curve.rfind("fraction,train_accuracy,cv_accuracy\n", 0) == 0);
    CHECK(std::count(curve.begin(), curve.end(), '\n') == 3);
}

TEST_CASE("learning_curve at fraction 1.0 reproduces plain cross-validation") {
    const auto ds = make_blobs({30, 30}, 4, 2, 2.0, 5);
    const auto spec = ModelSpec::knn_spec(3);
    const auto curve = learning_curve(spec, ds, {0.4, 1.0}, 4, 42);
    REQUIRE(curve.size() == 2);

    const auto scores = cross_validate(spec, ds, 4, 42);
    const double mean =
        std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
    CHECK(std::abs(curve[1].cv_accuracy - mean) < 1e-12);
    CHECK(curve[0].fraction == 0.4);

    CHECK_THROWS_AS(learning_curve(spec, ds, {0.5, 0.5}, 4, 42), UsageError);
    CHECK_THROWS_AS(learning_curve(spec, ds, {0.0, 1.0}, 4, 42), UsageError);
}

TEST_CASE("preprocessor transform matches the pipeline's own features") {
    TempFile csv(make_csv({60, 40, 20}, 51));
    TempDir out;
    auto config = small_config(csv.path(), out.str());
    config.z_threshold = 100.0;  // keep every row so table rows map 1:1

    const auto data = prepare_data(config);
    const auto table = load_table(csv.path());
    const Eigen::MatrixXd transformed = data.preprocessor.transform(table);
    CHECK(transformed.rows() == 120);
    CHECK(transformed.cols() == 3);

    // every persisted test row appears verbatim among the transformed rows
    for (Eigen::Index i = 0; i < data.test.n(); ++i) {
        bool found = false;
        for (Eigen::Index r = 0; r < transformed.rows() && !found; ++r)
            found = transformed.row(r) == data.test.X.row(i);
        CHECK(found);
    }

    // save/load round-trip transforms identically
    const std::string path = (out.path() / "pre.json").string();
    save_preprocessor(data.preprocessor, path);
    const auto loaded = load_preprocessor(path);
    CHECK(loaded.transform(table) == transformed);
    CHECK(loaded.target_encoder.categories == data.preprocessor.target_encoder.categories);

    // a table missing a feature column is rejected
    TempFile bad("f0,f1,f2,proto,label\n1,2,3,tcp,attack\n");
    CHECK_THROWS_AS(loaded.transform(load_table(bad.path())), DataError);
}

TEST_CASE("config validation rejects bad values") {
    PipelineConfig c;
    c.data_path = "x.csv";
    CHECK_NOTHROW(c.validate());

    auto bad = c;
    bad.mode = "other";
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.test_fraction = 1.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.models = {"svm"};
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.cv_folds = 1;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.curve_fractions = {0.5, 0.4};
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = c;
    bad.data_path.clear();
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("load_config parses overrides and rejects unknown keys") {
    TempFile good(R"({"data_path":"d.csv","rfe_k":7,"models":["rf"],"seed":5})", "config.json");
    const auto c = load_config(good.path());
    CHECK(c.data_path == "d.csv");
    CHECK(c.rfe_k == 7);
    CHECK(c.models == std::vector<std::string>{"rf"});
    CHECK(c.seed == 5);
    CHECK(c.mode == "paper-order");  // untouched default

    TempFile bad(R"({"data_path":"d.csv","rfe_kk":7})", "config.json");
    CHECK_THROWS_AS(load_config(bad.path()), UsageError);
    CHECK_THROWS_AS(load_config("/no/such/config.json"), UsageError);
}

TEST_CASE("resolve_data_path falls back to IOTIDS_DATA_DIR") {
    TempDir dir;
    std::ofstream((dir.path() / "relative.csv")) << "a,label\n1,x\n";
    CHECK(resolve_data_path("definitely/not/here.csv") == "definitely/not/here.csv");

    setenv("IOTIDS_DATA_DIR", dir.str().c_str(), 1);
    CHECK(resolve_data_path("relative.csv") == (dir.path() / "relative.csv").string());
    unsetenv("IOTIDS_DATA_DIR");
}
