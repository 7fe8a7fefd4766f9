#include <doctest.h>

#include <algorithm>
#include <set>

#include "iotids/dataset.hpp"
#include "iotids/errors.hpp"
#include "iotids/rng.hpp"
#include "test_util.hpp"

using namespace iotids;
using testutil::TempFile;

TEST_CASE("load_dataset reads a minimal one-row csv") {
    TempFile f("a,b,label\n1.0,2.0,x\n");
    const auto table = load_dataset(f.path(), "label", {});
    CHECK(table.n_rows() == 1);
    CHECK(table.header == std::vector<std::string>{"a", "b", "label"});
}

TEST_CASE("load_dataset reports the ragged row number") {
    std::string csv = "a,b,label\n";
    for (int i = 1; i <= 10; ++i)
        csv += (i == 7) ? "1.0,x\n" : "1.0,2.0,x\n";
    TempFile f(csv);
    CHECK_THROWS_WITH_AS(load_dataset(f.path(), "label", {}),
                         doctest::Contains("row 7"), DataError);
}

TEST_CASE("load_dataset error paths") {
    CHECK_THROWS_AS(load_dataset("/no/such/file.csv", "label", {}), DataError);

    TempFile empty("", "empty.csv");
    CHECK_THROWS_AS(load_dataset(empty.path(), "label", {}), DataError);

    TempFile f("a,b,label\n1,2,x\n");
    CHECK_THROWS_AS(load_dataset(f.path(), "missing", {}), DataError);
    CHECK_THROWS_AS(load_dataset(f.path(), "label", {"missing"}), DataError);
}

TEST_CASE("encode maps categoricals to lexicographic ordinals") {
    TempFile f("cat,num,label\nb,1.5,yes\na,2.5,no\nb,3.5,yes\n");
    const auto table = load_dataset(f.path(), "label", {"cat"});
    const auto enc = encode(table, "label", {"cat"});

    CHECK(enc.dataset.X(0, 0) == 1.0);  // "b"
    CHECK(enc.dataset.X(1, 0) == 0.0);  // "a"
    CHECK(enc.dataset.X(2, 0) == 1.0);
    CHECK(enc.dataset.class_names == std::vector<std::string>{"no", "yes"});
    CHECK(enc.dataset.y[0] == 1);
    CHECK(enc.dataset.y[1] == 0);
}

TEST_CASE("encode handles a single-class target") {
    TempFile f("a,label\n1,only\n2,only\n");
    const auto enc = encode(load_dataset(f.path(), "label", {}), "label", {});
    CHECK(enc.dataset.n_classes() == 1);
    CHECK(enc.dataset.y[0] == 0);
    CHECK(enc.dataset.y[1] == 0);
}

TEST_CASE("encode rejects unparseable numeric cells with location") {
    TempFile f("a,label\n1.0,x\nnot_a_number,x\n");
    CHECK_THROWS_WITH_AS(encode(load_dataset(f.path(), "label", {}), "label", {}),
                         doctest::Contains("row 2"), DataError);
}

TEST_CASE("target encoder round-trips observed categories") {
    std::vector<std::string> values = {"gamma", "alpha", "beta", "alpha"};
    const auto enc = LabelEncoder::fit(values);
    for (const auto& v : values) CHECK(enc.decode(enc.encode(v)) == v);
    CHECK(enc.n_categories() == 3);
    CHECK_THROWS_AS(enc.encode("delta"), DataError);
}

namespace {

Dataset indexed_dataset(const std::vector<int>& class_counts) {
    // feature 0 carries the original row index so split membership is traceable
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    int idx = 0;
    for (std::size_t c = 0; c < class_counts.size(); ++c)
        for (int i = 0; i < class_counts[c]; ++i) {
            rows.push_back({static_cast<double>(idx++), 1.0});
            labels.push_back(static_cast<int>(c));
        }
    return testutil::make_dataset(rows, labels, static_cast<int>(class_counts.size()));
}

}  // namespace

TEST_CASE("stratified_split takes floor(n_c * fraction) per class") {
    const auto ds = indexed_dataset({10, 10, 10});
    const auto split = stratified_split(ds, 0.2, 7);
    const auto test_counts = split.test.class_counts();
    for (auto c : test_counts) CHECK(c == 2);
    CHECK(split.train.n() + split.test.n() == ds.n());
}

TEST_CASE("stratified_split sends tiny classes entirely to train") {
    const auto ds = indexed_dataset({4});
    const auto split = stratified_split(ds, 0.2, 7);
    CHECK(split.test.n() == 0);
    CHECK(split.train.n() == 4);
}

TEST_CASE("stratified_split matches the seeded shuffle oracle") {
    const auto ds = indexed_dataset({100, 10, 3});
    const auto split = stratified_split(ds, 0.2, 42);

    const auto test_counts = split.test.class_counts();
    CHECK(test_counts == std::vector<std::int64_t>{20, 2, 0});

    // oracle: per class, shuffle the original row indices with the derived
    // stream and take the first floor(n_c * fraction)
    std::set<int> expected_test;
    std::vector<std::vector<int>> by_class(3);
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        by_class[static_cast<std::size_t>(ds.y[i])].push_back(static_cast<int>(i));
    for (int cls = 0; cls < 3; ++cls) {
        auto rows = by_class[static_cast<std::size_t>(cls)];
        Rng rng(Rng::mix(42, static_cast<std::uint64_t>(cls)));
        rng.shuffle(rows);
        const std::size_t n_test =
            static_cast<std::size_t>(std::floor(0.2 * static_cast<double>(rows.size())));
        for (std::size_t i = 0; i < n_test; ++i) expected_test.insert(rows[i]);
    }
    std::set<int> actual_test;
    for (Eigen::Index i = 0; i < split.test.n(); ++i)
        actual_test.insert(static_cast<int>(split.test.X(i, 0)));
    CHECK(actual_test == expected_test);

    // rerun with the same seed gives identical index sets
    const auto rerun = stratified_split(ds, 0.2, 42);
    CHECK(rerun.test.X == split.test.X);
    CHECK(rerun.train.X == split.train.X);
}

TEST_CASE("stratified_split per-class accounting") {
    const auto ds = indexed_dataset({17, 9, 5, 2});
    const double fraction = 0.3;
    const auto split = stratified_split(ds, fraction, 3);
    const auto full = ds.class_counts();
    const auto train_c = split.train.class_counts();
    const auto test_c = split.test.class_counts();
    for (std::size_t c = 0; c < full.size(); ++c) {
        CHECK(train_c[c] + test_c[c] == full[c]);
        CHECK(std::abs(static_cast<double>(test_c[c]) -
                       static_cast<double>(full[c]) * fraction) < 1.0);
        CHECK(train_c[c] >= 1);
    }
    split.train.validate();
}

TEST_CASE("stratified_split rejects bad fractions and empty data") {
    const auto ds = indexed_dataset({5});
    CHECK_THROWS_AS(stratified_split(ds, 0.0, 1), UsageError);
    CHECK_THROWS_AS(stratified_split(ds, 1.0, 1), UsageError);
    Dataset empty;
    CHECK_THROWS_AS(stratified_split(empty, 0.2, 1), DataError);
}

TEST_CASE("dataset validate catches NaN and bad labels") {
    auto ds = indexed_dataset({3});
    ds.X(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(ds.validate(), DataError);

    auto ds2 = indexed_dataset({3});
    ds2.y[0] = 7;
    CHECK_THROWS_AS(ds2.validate(), DataError);
}
