#include "iotids/preprocess.hpp"

#include <cmath>

#include "iotids/errors.hpp"

namespace iotids {

namespace {

// column-wise population mean and std
void column_stats(const Eigen::MatrixXd& X, Eigen::VectorXd& mean, Eigen::VectorXd& std_dev) {
    const double n = static_cast<double>(X.rows());
    mean = X.colwise().mean();
    std_dev.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - mean[j]).square().sum() / n;
        std_dev[j] = std::sqrt(std::max(var, 0.0));
    }
}

}  // namespace

std::pair<Dataset, OutlierReport> remove_outliers_zscore(const Dataset& ds, double threshold) {
    ds.validate();
    if (!(threshold > 0.0)) throw UsageError("z-score threshold must be positive");

    Eigen::VectorXd mean, std_dev;
    column_stats(ds.X, mean, std_dev);

    OutlierReport report;
    report.threshold = threshold;

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        bool outlier = false;
        for (Eigen::Index j = 0; j < ds.d(); ++j) {
            if (std_dev[j] == 0.0) continue;
            if (std::abs(ds.X(i, j) - mean[j]) > threshold * std_dev[j]) {
                outlier = true;
                break;
            }
        }
        if (outlier) {
            report.rows_removed++;
            report.removed_per_class[ds.y[i]]++;
        } else {
            keep.push_back(i);
        }
    }

    if (keep.empty())
        throw DataError("z-score filter removed every row (threshold " +
                        std::to_string(threshold) + " too aggressive)");
    return {ds.select_rows(keep), report};
}

Standardizer fit_standardizer(const Dataset& ds) {
    ds.validate();
    Standardizer s;
    column_stats(ds.X, s.mean, s.std);
    return s;
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& ds) {
    if (s.mean.size() != ds.d())
        throw DataError("standardizer dimension " + std::to_string(s.mean.size()) +
                        " does not match dataset dimension " + std::to_string(ds.d()));
    Dataset out = ds;
    for (Eigen::Index j = 0; j < ds.d(); ++j) {
        if (s.std[j] == 0.0)
            out.X.col(j).setZero();
        else
            out.X.col(j) = (ds.X.col(j).array() - s.mean[j]) / s.std[j];
    }
    return out;
}

}  // namespace iotids
