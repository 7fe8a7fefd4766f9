#include "iotids/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iotids/errors.hpp"
#include "iotids/models.hpp"
#include "iotids/rng.hpp"

namespace iotids {

namespace {

// Seeded stratified row subsample used for the ranking fits only.
std::vector<Eigen::Index> ranking_rows(const Dataset& ds, Eigen::Index limit, std::uint64_t seed) {
    std::vector<Eigen::Index> rows;
    if (limit <= 0 || ds.n() <= limit) {
        rows.resize(static_cast<std::size_t>(ds.n()));
        std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        return rows;
    }
    const double fraction = static_cast<double>(limit) / static_cast<double>(ds.n());
    std::vector<std::vector<Eigen::Index>> by_class(static_cast<std::size_t>(ds.n_classes()));
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        by_class[static_cast<std::size_t>(ds.y[i])].push_back(i);
    for (std::size_t cls = 0; cls < by_class.size(); ++cls) {
        auto& cls_rows = by_class[cls];
        if (cls_rows.empty()) continue;
        Rng rng(Rng::mix(seed, 0xF500 + cls));
        rng.shuffle(cls_rows);
        const std::size_t keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(cls_rows.size()))));
        rows.insert(rows.end(), cls_rows.begin(),
                    cls_rows.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(rows.begin(), rows.end());
    return rows;
}

}  // namespace

FeatureSubset rfe_select(const Dataset& ds, int k, std::uint64_t seed,
                         const RfeOptions& options) {
    ds.validate();
    const int d = static_cast<int>(ds.d());
    if (k < 1 || k > d)
        throw UsageError("rfe target k = " + std::to_string(k) + " out of range [1, " +
                         std::to_string(d) + "]");
    if (options.step < 1) throw UsageError("rfe step must be >= 1");

    FeatureSubset result;
    result.ranking.assign(static_cast<std::size_t>(d), 1);

    std::vector<int> surviving(static_cast<std::size_t>(d));
    std::iota(surviving.begin(), surviving.end(), 0);

    const auto rows = ranking_rows(ds, options.ranking_subsample, seed);
    const Dataset ranking_ds = ds.select_rows(rows);

    int next_rank = 2;
    std::uint64_t round = 0;
    while (static_cast<int>(surviving.size()) > k) {
        ++round;
        const Dataset sub = ranking_ds.select_columns(surviving);
        RfHyperParams params = options.ranking_params;
        const TrainedModel ranker = fit_classifier(ModelSpec::random_forest(params), sub,
                                                   Rng::mix(seed, 0x8FE0 + round));
        const auto forest = std::dynamic_pointer_cast<const RandomForestModel>(ranker.impl);
        const Eigen::VectorXd& importance = forest->feature_importance;

        const int to_drop =
            std::min(options.step, static_cast<int>(surviving.size()) - k);
        // least important first; importance ties eliminate the highest column
        // index first
        std::vector<int> order(surviving.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (importance[a] != importance[b]) return importance[a] < importance[b];
            return surviving[static_cast<std::size_t>(a)] > surviving[static_cast<std::size_t>(b)];
        });

        std::vector<int> drop_cols;
        for (int i = 0; i < to_drop; ++i) {
            const int col = surviving[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
            result.ranking[static_cast<std::size_t>(col)] = next_rank++;
            drop_cols.push_back(col);
        }
        std::erase_if(surviving, [&](int col) {
            return std::find(drop_cols.begin(), drop_cols.end(), col) != drop_cols.end();
        });
    }

    result.selected = surviving;  // already ascending
    return result;
}

}  // namespace iotids
