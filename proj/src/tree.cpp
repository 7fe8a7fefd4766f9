#include "iotids/tree.hpp"

#include <algorithm>
#include <numeric>

#include "iotids/errors.hpp"

namespace iotids {

namespace {

double gini_from_counts(const Eigen::VectorXd& counts, double total) {
    if (total <= 0.0) return 0.0;
    double sum_sq = 0.0;
    for (Eigen::Index c = 0; c < counts.size(); ++c) sum_sq += counts[c] * counts[c];
    return 1.0 - sum_sq / (total * total);
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;  // parent gini minus weighted child gini
};

class TreeBuilder {
public:
    TreeBuilder(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, int n_classes,
                const RfHyperParams& params, int mtry, Rng& rng, Eigen::VectorXd* importance,
                double n_total)
        : X_(X), y_(y), n_classes_(n_classes), params_(params), mtry_(mtry), rng_(rng),
          importance_(importance), n_total_(n_total) {
        feature_pool_.resize(static_cast<std::size_t>(X.cols()));
        std::iota(feature_pool_.begin(), feature_pool_.end(), 0);
    }

    std::vector<TreeNode> nodes;

    int build(std::vector<Eigen::Index>& idx, int depth) {
        const double m = static_cast<double>(idx.size());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_classes_);
        for (Eigen::Index i : idx) counts[y_[i]] += 1.0;
        const double node_gini = gini_from_counts(counts, m);

        const bool can_split = depth < params_.max_depth &&
                               static_cast<int>(idx.size()) >= params_.min_samples_split &&
                               node_gini > 0.0;
        SplitChoice best;
        if (can_split) best = find_best_split(idx, counts, node_gini);

        if (best.feature < 0) return make_leaf(std::move(counts));

        if (importance_)
            (*importance_)[best.feature] += (m / n_total_) * best.decrease;

        auto mid = std::stable_partition(idx.begin(), idx.end(), [&](Eigen::Index i) {
            return X_(i, best.feature) <= best.threshold;
        });
        std::vector<Eigen::Index> left_idx(idx.begin(), mid);
        std::vector<Eigen::Index> right_idx(mid, idx.end());

        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].feature = best.feature;
        nodes[node_id].threshold = best.threshold;
        const int left = build(left_idx, depth + 1);
        const int right = build(right_idx, depth + 1);
        nodes[node_id].left = left;
        nodes[node_id].right = right;
        return node_id;
    }

private:
    int make_leaf(Eigen::VectorXd counts) {
        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].class_counts = std::move(counts);
        return node_id;
    }

    SplitChoice find_best_split(const std::vector<Eigen::Index>& idx,
                                const Eigen::VectorXd& parent_counts, double parent_gini) {
        // partial Fisher-Yates draw of mtry distinct features
        const int d = static_cast<int>(X_.cols());
        for (int i = 0; i < mtry_; ++i) {
            const int j = i + static_cast<int>(rng_.below(static_cast<std::uint64_t>(d - i)));
            std::swap(feature_pool_[i], feature_pool_[j]);
        }

        const double m = static_cast<double>(idx.size());
        SplitChoice best;
        sorted_.resize(idx.size());

        for (int fi = 0; fi < mtry_; ++fi) {
            const int f = feature_pool_[static_cast<std::size_t>(fi)];
            for (std::size_t i = 0; i < idx.size(); ++i)
                sorted_[i] = {X_(idx[i], f), y_[idx[i]]};
            std::sort(sorted_.begin(), sorted_.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            left_counts_.setZero(n_classes_);
            double left_sq = 0.0;
            double right_sq = parent_counts.squaredNorm();
            Eigen::VectorXd right_counts = parent_counts;

            const std::size_t n = sorted_.size();
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const int cls = sorted_[i].second;
                // incremental sum of squared counts on both sides
                left_sq += 2.0 * left_counts_[cls] + 1.0;
                left_counts_[cls] += 1.0;
                right_sq -= 2.0 * right_counts[cls] - 1.0;
                right_counts[cls] -= 1.0;

                if (sorted_[i].first == sorted_[i + 1].first) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = m - nl;
                if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;

                const double gini_l = 1.0 - left_sq / (nl * nl);
                const double gini_r = 1.0 - right_sq / (nr * nr);
                const double weighted = (nl * gini_l + nr * gini_r) / m;
                const double decrease = parent_gini - weighted;
                // strict improvement only: ties keep the earliest candidate in
                // draw order, which makes the tree deterministic
                if (decrease > best.decrease) {
                    best.feature = f;
                    best.threshold = 0.5 * (sorted_[i].first + sorted_[i + 1].first);
                    best.decrease = decrease;
                }
            }
        }
        if (best.feature >= 0 && best.decrease <= 1e-12) best.feature = -1;
        return best;
    }

    const Eigen::MatrixXd& X_;
    const Eigen::VectorXi& y_;
    const int n_classes_;
    const RfHyperParams& params_;
    const int mtry_;
    Rng& rng_;
    Eigen::VectorXd* importance_;
    const double n_total_;

    std::vector<int> feature_pool_;
    std::vector<std::pair<double, int>> sorted_;
    Eigen::VectorXd left_counts_;
};

}  // namespace

Eigen::VectorXd DecisionTree::predict_proba_row(
    const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    const Eigen::VectorXd& counts = nodes[static_cast<std::size_t>(node)].class_counts;
    const double total = counts.sum();
    if (total <= 0.0) return Eigen::VectorXd::Constant(n_classes, 1.0 / n_classes);
    return counts / total;
}

int DecisionTree::max_depth() const {
    // depth of the node tree by traversal
    std::vector<std::pair<int, int>> stack = {{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
        auto [node, depth] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, depth);
        const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
        if (nd.feature >= 0) {
            stack.push_back({nd.left, depth + 1});
            stack.push_back({nd.right, depth + 1});
        }
    }
    return deepest;
}

DecisionTree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, int n_classes,
                      const RfHyperParams& params, const std::vector<Eigen::Index>& sample_idx,
                      int mtry, Rng& rng, Eigen::VectorXd* importance) {
    if (sample_idx.empty()) throw DataError("cannot fit a tree on zero samples");
    if (mtry < 1 || mtry > X.cols()) throw UsageError("mtry out of range");

    TreeBuilder builder(X, y, n_classes, params, mtry, rng, importance,
                        static_cast<double>(sample_idx.size()));
    std::vector<Eigen::Index> idx = sample_idx;
    builder.build(idx, 0);

    DecisionTree tree;
    tree.nodes = std::move(builder.nodes);
    tree.n_classes = n_classes;
    return tree;
}

}  // namespace iotids
