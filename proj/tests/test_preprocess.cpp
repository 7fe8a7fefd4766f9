#include <doctest.h>

#include <cmath>

#include "iotids/errors.hpp"
#include "iotids/preprocess.hpp"
#include "iotids/rng.hpp"
#include "test_util.hpp"

using namespace iotids;
using testutil::make_dataset;

TEST_CASE("constant data produces no outliers") {
    std::vector<std::vector<double>> rows(20, {3.0, -1.0});
    const auto ds = make_dataset(rows, std::vector<int>(20, 0), 1);
    const auto [out, report] = remove_outliers_zscore(ds, 0.5);
    CHECK(report.rows_removed == 0);
    CHECK(out.n() == 20);
}

TEST_CASE("a single extreme value is removed at threshold 3") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 9; ++i) rows.push_back({1.0});
    rows.push_back({50.0});
    const auto ds = make_dataset(rows, std::vector<int>(10, 0), 1);

    // oracle: z-scores by hand from population stats
    const double mean = (9.0 * 1.0 + 50.0) / 10.0;
    double var = 0.0;
    for (const auto& r : rows) var += (r[0] - mean) * (r[0] - mean);
    var /= 10.0;
    const double sd = std::sqrt(var);
    REQUIRE(std::abs(50.0 - mean) > 3.0 * sd);
    REQUIRE(std::abs(1.0 - mean) <= 3.0 * sd);

    const auto [out, report] = remove_outliers_zscore(ds, 3.0);
    CHECK(report.rows_removed == 1);
    CHECK(out.n() == 9);
    for (Eigen::Index i = 0; i < out.n(); ++i) CHECK(out.X(i, 0) == 1.0);
    CHECK(report.removed_per_class.at(0) == 1);
}

TEST_CASE("normal data loses a small fraction at threshold 3") {
    const int n = 10000, d = 5;
    Rng rng(11);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n; ++i) {
        std::vector<double> r(d);
        for (auto& v : r) v = rng.normal();
        rows.push_back(std::move(r));
    }
    const auto ds = make_dataset(rows, std::vector<int>(n, 0), 1);
    const auto [out, report] = remove_outliers_zscore(ds, 3.0);
    const double fraction = static_cast<double>(report.rows_removed) / n;
    // P(|z| > 3) ~ 0.27% per feature, union bound over 5 features
    CHECK(fraction > 0.005);
    CHECK(fraction < 0.03);
}

TEST_CASE("outlier filter keeps feature names and row subset order") {
    Rng rng(5);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 200; ++i) rows.push_back({static_cast<double>(i), rng.normal() * 10});
    const auto ds = make_dataset(rows, std::vector<int>(200, 0), 1);
    const auto [out, report] = remove_outliers_zscore(ds, 1.5);
    CHECK(out.feature_names == ds.feature_names);
    CHECK(out.d() == ds.d());
    // surviving rows keep ascending original order (feature 0 is the index)
    for (Eigen::Index i = 1; i < out.n(); ++i) CHECK(out.X(i, 0) > out.X(i - 1, 0));
    CHECK(out.n() + report.rows_removed == ds.n());
}

TEST_CASE("all rows removed is an error") {
    // two distant points: each is an outlier of the joint distribution at a
    // tiny threshold
    const auto ds = make_dataset({{0.0}, {10.0}}, {0, 0}, 1);
    CHECK_THROWS_AS(remove_outliers_zscore(ds, 0.5), DataError);
}

TEST_CASE("fit_standardizer computes population statistics") {
    const auto ds = make_dataset({{2.0}, {4.0}, {6.0}}, {0, 0, 0}, 1);
    const auto s = fit_standardizer(ds);
    CHECK(s.mean[0] == doctest::Approx(4.0));
    CHECK(s.std[0] == doctest::Approx(std::sqrt(8.0 / 3.0)));
}

TEST_CASE("constant column has std zero and maps to zeros") {
    const auto ds = make_dataset({{7.0, 1.0}, {7.0, 2.0}, {7.0, 3.0}}, {0, 0, 0}, 1);
    const auto s = fit_standardizer(ds);
    CHECK(s.std[0] == 0.0);
    const auto out = apply_standardizer(s, ds);
    for (Eigen::Index i = 0; i < out.n(); ++i) CHECK(out.X(i, 0) == 0.0);
}

TEST_CASE("standardization is a fixed point on standardized data") {
    Rng rng(3);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 500; ++i) rows.push_back({rng.normal() * 4 + 2, rng.uniform()});
    const auto ds = make_dataset(rows, std::vector<int>(500, 0), 1);
    const auto once = apply_standardizer(fit_standardizer(ds), ds);
    const auto s2 = fit_standardizer(once);
    for (Eigen::Index j = 0; j < once.d(); ++j) {
        CHECK(std::abs(s2.mean[j]) < 1e-12);
        CHECK(std::abs(s2.std[j] - 1.0) < 1e-12);
    }
}

TEST_CASE("known column transforms to known z-scores") {
    const auto ds = make_dataset({{2.0}, {4.0}, {6.0}}, {0, 0, 0}, 1);
    const auto out = apply_standardizer(fit_standardizer(ds), ds);
    CHECK(out.X(0, 0) == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-12));
    CHECK(out.X(1, 0) == doctest::Approx(0.0));
    CHECK(out.X(2, 0) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
}

TEST_CASE("fit then apply yields near-zero means and unit variance") {
    Rng rng(9);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 1000; ++i)
        rows.push_back({rng.normal() * 3 - 5, rng.uniform() * 100, rng.normal()});
    const auto ds = make_dataset(rows, std::vector<int>(1000, 0), 1);
    const auto out = apply_standardizer(fit_standardizer(ds), ds);
    for (Eigen::Index j = 0; j < out.d(); ++j) {
        CHECK(std::abs(out.X.col(j).mean()) < 1e-9);
        const double var = out.X.col(j).squaredNorm() / static_cast<double>(out.n());
        CHECK(std::abs(var - 1.0) < 1e-9);
    }
}

TEST_CASE("standardization preserves the correlation matrix") {
    Rng rng(13);
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < 300; ++i) {
        const double a = rng.normal();
        rows.push_back({a * 2 + 1, a + rng.normal() * 0.5, rng.normal()});
    }
    const auto ds = make_dataset(rows, std::vector<int>(300, 0), 1);
    const auto out = apply_standardizer(fit_standardizer(ds), ds);

    auto pearson = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        const Eigen::VectorXd xc = x.array() - x.mean();
        const Eigen::VectorXd yc = y.array() - y.mean();
        return xc.dot(yc) / std::sqrt(xc.squaredNorm() * yc.squaredNorm());
    };
    for (Eigen::Index a = 0; a < ds.d(); ++a)
        for (Eigen::Index b = a + 1; b < ds.d(); ++b)
            CHECK(std::abs(pearson(ds.X.col(a), ds.X.col(b)) -
                           pearson(out.X.col(a), out.X.col(b))) < 1e-9);
}

TEST_CASE("apply_standardizer rejects dimension mismatch") {
    const auto ds = make_dataset({{1.0, 2.0}}, {0}, 1);
    Standardizer s;
    s.mean = Eigen::VectorXd::Zero(3);
    s.std = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(apply_standardizer(s, ds), DataError);
}
