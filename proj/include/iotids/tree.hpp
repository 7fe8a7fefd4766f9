#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "iotids/rng.hpp"

namespace iotids {

struct RfHyperParams {
    int n_estimators = 100;
    int max_depth = 10;
    int min_samples_split = 5;
    int min_samples_leaf = 2;
    std::uint64_t seed = 42;
};

// Flat node array; feature < 0 marks a leaf. Internal nodes route
// x[feature] <= threshold to left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Eigen::VectorXd class_counts;  // leaf only: bootstrap-sample counts per class
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    int n_classes = 0;

    // leaf class frequencies for one row
    Eigen::VectorXd predict_proba_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    int max_depth() const;
};

// Greedy CART on the given sample indices (with repetition allowed, as in a
// bootstrap). Each node draws mtry candidate features without replacement and
// splits at midpoints of consecutive distinct sorted values, maximizing the
// weighted Gini decrease. When `importance` is non-null, each executed
// split adds (n_node/n_total) * gini_decrease to its feature's entry.
DecisionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, int n_classes,
                      const RfHyperParams& params, const std::vector<Eigen::Index>& sample_idx,
                      int mtry, Rng& rng, Eigen::VectorXd* importance = nullptr);

}  // namespace iotids
