#include "iotids/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "iotids/errors.hpp"

namespace iotids {

ConfusionMatrix confusion_matrix(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred,
                                 int n_classes) {
    if (y_true.size() != y_pred.size())
        throw DataError("y_true and y_pred lengths differ");
    ConfusionMatrix cm;
    cm.counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n_classes,
                                                                                  n_classes);
    for (Eigen::Index i = 0; i < y_true.size(); ++i) {
        const int t = y_true[i], p = y_pred[i];
        if (t < 0 || t >= n_classes || p < 0 || p >= n_classes)
            throw DataError("label out of range at position " + std::to_string(i));
        cm.counts(t, p)++;
    }
    return cm;
}

MetricReport classification_report(const ConfusionMatrix& cm) {
    const int c = cm.n_classes();
    const std::int64_t total = cm.total();
    if (total < 1) throw DataError("empty confusion matrix");

    MetricReport r;
    r.precision.assign(static_cast<std::size_t>(c), 0.0);
    r.recall.assign(static_cast<std::size_t>(c), 0.0);
    r.f1.assign(static_cast<std::size_t>(c), 0.0);
    r.zero_division_precision.assign(static_cast<std::size_t>(c), false);
    r.zero_division_recall.assign(static_cast<std::size_t>(c), false);

    double trace = 0.0;
    double macro_p = 0.0, macro_r = 0.0, macro_f = 0.0;
    double weighted_p = 0.0, weighted_r = 0.0, weighted_f = 0.0;
    int present_classes = 0;

    for (int i = 0; i < c; ++i) {
        const auto diag = cm.counts(i, i);
        const auto rowsum = cm.counts.row(i).sum();
        const auto colsum = cm.counts.col(i).sum();
        trace += static_cast<double>(diag);

        double p = 0.0, rec = 0.0;
        if (colsum == 0) {
            r.zero_division_precision[static_cast<std::size_t>(i)] = true;
        } else {
            p = static_cast<double>(diag) / static_cast<double>(colsum);
        }
        if (rowsum == 0) {
            r.zero_division_recall[static_cast<std::size_t>(i)] = true;
        } else {
            rec = static_cast<double>(diag) / static_cast<double>(rowsum);
        }
        const double f = (p + rec > 0.0) ? 2.0 * p * rec / (p + rec) : 0.0;

        r.precision[static_cast<std::size_t>(i)] = p;
        r.recall[static_cast<std::size_t>(i)] = rec;
        r.f1[static_cast<std::size_t>(i)] = f;

        if (rowsum > 0) {
            present_classes++;
            macro_p += p;
            macro_r += rec;
            macro_f += f;
            const double w = static_cast<double>(rowsum) / static_cast<double>(total);
            weighted_p += w * p;
            weighted_r += w * rec;
            weighted_f += w * f;
        }
    }

    r.accuracy = trace / static_cast<double>(total);
    if (present_classes > 0) {
        r.macro_precision = macro_p / present_classes;
        r.macro_recall = macro_r / present_classes;
        r.macro_f1 = macro_f / present_classes;
    }
    r.weighted_precision = weighted_p;
    r.weighted_recall = weighted_r;
    r.weighted_f1 = weighted_f;
    return r;
}

double cohen_kappa(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total < 1) throw DataError("empty confusion matrix");
    const double n = static_cast<double>(total);

    double p_o = 0.0, p_e = 0.0;
    for (int i = 0; i < cm.n_classes(); ++i) {
        p_o += static_cast<double>(cm.counts(i, i));
        p_e += static_cast<double>(cm.counts.row(i).sum()) *
               static_cast<double>(cm.counts.col(i).sum());
    }
    p_o /= n;
    p_e /= n * n;
    if (p_e >= 1.0) return p_o >= 1.0 ? 1.0 : 0.0;
    return (p_o - p_e) / (1.0 - p_e);
}

double roc_auc_ovr_macro(const Eigen::VectorXi& y_true, const Eigen::MatrixXd& proba,
                         int* n_skipped) {
    if (y_true.size() != proba.rows()) throw DataError("y_true and proba lengths differ");
    const Eigen::Index n = y_true.size();
    const int c = static_cast<int>(proba.cols());
    if (n < 1) throw DataError("empty input");

    double auc_sum = 0.0;
    int eligible = 0, skipped = 0;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (int cls = 0; cls < c; ++cls) {
        Eigen::Index positives = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            if (y_true[i] == cls) positives++;
        const Eigen::Index negatives = n - positives;
        if (positives == 0 || negatives == 0) {
            skipped++;
            continue;
        }

        // rank statistic with midranks for ties
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
            return proba(a, cls) < proba(b, cls);
        });
        double pos_rank_sum = 0.0;
        Eigen::Index i = 0;
        while (i < n) {
            Eigen::Index j = i;
            while (j < n && proba(order[j], cls) == proba(order[i], cls)) ++j;
            const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
            for (Eigen::Index t = i; t < j; ++t)
                if (y_true[order[t]] == cls) pos_rank_sum += midrank;
            i = j;
        }
        const double p = static_cast<double>(positives);
        const double auc =
            (pos_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
        auc_sum += auc;
        eligible++;
    }

    if (n_skipped) *n_skipped = skipped;
    if (eligible == 0) throw DataError("no class has both positives and negatives");
    return auc_sum / eligible;
}

}  // namespace iotids
