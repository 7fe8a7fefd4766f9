#pragma once

#include <map>
#include <utility>

#include "iotids/dataset.hpp"

namespace iotids {

// Per-feature location/scale, population statistics (divide by n).
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;  // population std, >= 0
};

struct OutlierReport {
    double threshold = 0.0;
    std::int64_t rows_removed = 0;
    std::map<int, std::int64_t> removed_per_class;
};

// Drops every row with any |x - mean| > threshold * std (population stats over
// ds). Zero-variance features never trigger removal. Throws DataError if
// nothing survives.
std::pair<Dataset, OutlierReport> remove_outliers_zscore(const Dataset& ds, double threshold);

Standardizer fit_standardizer(const Dataset& ds);

// x' = (x - mean) / std, with zero-variance columns mapped to all zeros.
Dataset apply_standardizer(const Standardizer& s, const Dataset& ds);

}  // namespace iotids
