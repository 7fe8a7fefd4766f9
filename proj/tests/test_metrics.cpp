#include <doctest.h>

#include <cmath>
#include <vector>

#include "iotids/errors.hpp"
#include "iotids/metrics.hpp"
#include "iotids/rng.hpp"

using namespace iotids;

namespace {

Eigen::VectorXi vec(std::initializer_list<int> v) {
    Eigen::VectorXi out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (int x : v) out[i++] = x;
    return out;
}

ConfusionMatrix cm_from(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
    ConfusionMatrix cm;
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    cm.counts.resize(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (std::int64_t v : row) cm.counts(i, j++) = v;
        ++i;
    }
    return cm;
}

// O(n^2) all-pairs AUC oracle for one class
double auc_pairs_oracle(const Eigen::VectorXi& y, const Eigen::VectorXd& score, int cls) {
    double wins = 0.0;
    std::int64_t pairs = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != cls) continue;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            if (y[j] == cls) continue;
            ++pairs;
            if (score[i] > score[j]) wins += 1.0;
            else if (score[i] == score[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("confusion matrix direct count") {
    const auto cm = confusion_matrix(vec({0, 1, 1}), vec({0, 1, 0}), 2);
    CHECK(cm.counts(0, 0) == 1);
    CHECK(cm.counts(0, 1) == 0);
    CHECK(cm.counts(1, 0) == 1);
    CHECK(cm.counts(1, 1) == 1);
}

TEST_CASE("perfect predictions give a diagonal of supports") {
    const auto y = vec({2, 0, 1, 2, 2, 0});
    const auto cm = confusion_matrix(y, y, 3);
    CHECK(cm.counts(0, 0) == 2);
    CHECK(cm.counts(1, 1) == 1);
    CHECK(cm.counts(2, 2) == 3);
    CHECK(cm.counts.sum() == cm.counts.diagonal().sum());
}

TEST_CASE("confusion matrix matches a brute-force tally on random labels") {
    Rng rng(21);
    const int n = 1000, c = 7;
    Eigen::VectorXi yt(n), yp(n);
    for (int i = 0; i < n; ++i) {
        yt[i] = static_cast<int>(rng.below(c));
        yp[i] = static_cast<int>(rng.below(c));
    }
    const auto cm = confusion_matrix(yt, yp, c);
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) {
            std::int64_t tally = 0;
            for (int t = 0; t < n; ++t)
                if (yt[t] == i && yp[t] == j) ++tally;
            CHECK(cm.counts(i, j) == tally);
        }
}

TEST_CASE("confusion matrix rejects out-of-range labels") {
    CHECK_THROWS_AS(confusion_matrix(vec({0, 3}), vec({0, 0}), 2), DataError);
    CHECK_THROWS_AS(confusion_matrix(vec({0, 1}), vec({0}), 2), DataError);
}

TEST_CASE("diagonal confusion matrix scores all ones") {
    const auto r = classification_report(cm_from({{5, 0}, {0, 9}}));
    CHECK(r.accuracy == 1.0);
    CHECK(r.macro_precision == 1.0);
    CHECK(r.weighted_f1 == 1.0);
    for (double p : r.precision) CHECK(p == 1.0);
}

TEST_CASE("hand-computed binary report") {
    const auto r = classification_report(cm_from({{20, 5}, {10, 15}}));
    CHECK(r.accuracy == doctest::Approx(0.7));
    CHECK(r.precision[0] == doctest::Approx(2.0 / 3.0));
    CHECK(r.precision[1] == doctest::Approx(3.0 / 4.0));
    CHECK(r.recall[0] == doctest::Approx(0.8));
    CHECK(r.recall[1] == doctest::Approx(0.6));
}

TEST_CASE("zero predicted count flags precision") {
    const auto r = classification_report(cm_from({{3, 0}, {2, 0}}));
    CHECK(r.precision[1] == 0.0);
    CHECK(r.zero_division_precision[1]);
    CHECK_FALSE(r.zero_division_precision[0]);
}

TEST_CASE("macro averages skip classes absent from the truth") {
    // class 2 never occurs in y_true
    const auto r = classification_report(cm_from({{4, 1, 0}, {0, 5, 0}, {0, 0, 0}}));
    CHECK(r.zero_division_recall[2]);
    CHECK(r.macro_recall == doctest::Approx((0.8 + 1.0) / 2.0));
}

TEST_CASE("weighted recall equals accuracy when all classes appear") {
    Rng rng(4);
    const int n = 500, c = 4;
    Eigen::VectorXi yt(n), yp(n);
    for (int i = 0; i < n; ++i) {
        yt[i] = i % c;  // every class present
        yp[i] = static_cast<int>(rng.below(c));
    }
    const auto cm = confusion_matrix(yt, yp, c);
    const auto r = classification_report(cm);
    CHECK(std::abs(r.weighted_recall - r.accuracy) < 1e-12);
}

TEST_CASE("cohen kappa reference values") {
    CHECK(cohen_kappa(cm_from({{10, 0}, {0, 7}})) == 1.0);
    CHECK(cohen_kappa(cm_from({{25, 25}, {25, 25}})) == doctest::Approx(0.0));
    CHECK(cohen_kappa(cm_from({{20, 5}, {10, 15}})) == doctest::Approx(0.4));
}

TEST_CASE("kappa is one only for diagonal matrices") {
    CHECK(cohen_kappa(cm_from({{50}})) == 1.0);  // all mass in one cell, p_e = 1
    CHECK(cohen_kappa(cm_from({{49, 1}, {0, 50}})) < 1.0);
}

TEST_CASE("auc extremes") {
    // binary, all positives scored above all negatives
    Eigen::VectorXi y(6);
    y << 1, 1, 1, 0, 0, 0;
    Eigen::MatrixXd proba(6, 2);
    proba << 0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.6, 0.4, 0.7, 0.3, 0.8, 0.2;
    CHECK(roc_auc_ovr_macro(y, proba) == doctest::Approx(1.0));

    // all scores identical -> 0.5
    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(6, 2, 0.5);
    CHECK(roc_auc_ovr_macro(y, flat) == doctest::Approx(0.5));
}

TEST_CASE("auc matches the all-pairs oracle") {
    Rng rng(33);
    const int n = 50, c = 3;
    Eigen::VectorXi y(n);
    Eigen::MatrixXd proba(n, c);
    for (int i = 0; i < n; ++i) {
        y[i] = static_cast<int>(rng.below(c));
        double sum = 0.0;
        for (int j = 0; j < c; ++j) {
            proba(i, j) = rng.uniform();
            sum += proba(i, j);
        }
        proba.row(i) /= sum;
    }
    double macro = 0.0;
    for (int cls = 0; cls < c; ++cls) macro += auc_pairs_oracle(y, proba.col(cls), cls);
    macro /= c;
    CHECK(std::abs(roc_auc_ovr_macro(y, proba) - macro) < 1e-12);
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    Rng rng(44);
    const int n = 80;
    Eigen::VectorXi y(n);
    Eigen::MatrixXd proba(n, 2);
    for (int i = 0; i < n; ++i) {
        y[i] = static_cast<int>(rng.below(2));
        proba(i, 1) = rng.uniform();
        proba(i, 0) = 1.0 - proba(i, 1);
    }
    const double base = roc_auc_ovr_macro(y, proba);

    Eigen::MatrixXd warped = proba;
    for (int i = 0; i < n; ++i) {
        warped(i, 1) = std::exp(3.0 * proba(i, 1));     // strictly increasing
        warped(i, 0) = std::exp(3.0 * proba(i, 0));
    }
    CHECK(std::abs(roc_auc_ovr_macro(y, warped) - base) < 1e-12);
}

TEST_CASE("class permutation leaves aggregates unchanged") {
    Rng rng(55);
    const int n = 300, c = 4;
    Eigen::VectorXi yt(n), yp(n);
    for (int i = 0; i < n; ++i) {
        yt[i] = static_cast<int>(rng.below(c));
        yp[i] = static_cast<int>(rng.below(c));
    }
    const int perm[c] = {2, 0, 3, 1};
    Eigen::VectorXi yt2(n), yp2(n);
    for (int i = 0; i < n; ++i) {
        yt2[i] = perm[yt[i]];
        yp2[i] = perm[yp[i]];
    }
    const auto r1 = classification_report(confusion_matrix(yt, yp, c));
    const auto r2 = classification_report(confusion_matrix(yt2, yp2, c));
    CHECK(std::abs(r1.macro_f1 - r2.macro_f1) < 1e-12);
    CHECK(std::abs(r1.weighted_precision - r2.weighted_precision) < 1e-12);
    CHECK(std::abs(cohen_kappa(confusion_matrix(yt, yp, c)) -
                   cohen_kappa(confusion_matrix(yt2, yp2, c))) < 1e-12);
    // per-class metrics permute along
    for (int cls = 0; cls < c; ++cls)
        CHECK(r1.f1[static_cast<std::size_t>(cls)] ==
              doctest::Approx(r2.f1[static_cast<std::size_t>(perm[cls])]));
}

TEST_CASE("metric ranges") {
    Rng rng(66);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 30, c = 3;
        Eigen::VectorXi yt(n), yp(n);
        for (int i = 0; i < n; ++i) {
            yt[i] = static_cast<int>(rng.below(c));
            yp[i] = static_cast<int>(rng.below(c));
        }
        const auto cm = confusion_matrix(yt, yp, c);
        const auto r = classification_report(cm);
        for (double v : {r.accuracy, r.macro_precision, r.weighted_precision, r.macro_recall,
                         r.weighted_recall, r.macro_f1, r.weighted_f1}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        const double kappa = cohen_kappa(cm);
        CHECK(kappa >= -1.0);
        CHECK(kappa <= 1.0);
    }
}
