#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace iotids {

// rows = true class, columns = predicted class
struct ConfusionMatrix {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

    int n_classes() const { return static_cast<int>(counts.rows()); }
    std::int64_t total() const { return counts.sum(); }
};

struct MetricReport {
    double accuracy = 0.0;
    std::vector<double> precision;  // per class
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<bool> zero_division_precision;  // no predictions for class
    std::vector<bool> zero_division_recall;     // class absent from truth
    double macro_precision = 0.0, weighted_precision = 0.0;
    double macro_recall = 0.0, weighted_recall = 0.0;
    double macro_f1 = 0.0, weighted_f1 = 0.0;
};

ConfusionMatrix confusion_matrix(const Eigen::VectorXi& y_true,
                                 const Eigen::VectorXi& y_pred, int n_classes);

// precision_c = cm[c][c]/colsum_c, recall_c = cm[c][c]/rowsum_c, 0 (flagged)
// on zero denominators. Macro averages skip classes absent from the truth;
// weighted averages weight by support.
MetricReport classification_report(const ConfusionMatrix& cm);

double cohen_kappa(const ConfusionMatrix& cm);

// One-vs-rest AUC per class via the rank statistic (ties count 1/2), averaged
// unweighted over classes that have both positives and negatives. Classes
// skipped that way are reported in *n_skipped when non-null.
double roc_auc_ovr_macro(const Eigen::VectorXi& y_true, const Eigen::MatrixXd& proba,
                         int* n_skipped = nullptr);

}  // namespace iotids
