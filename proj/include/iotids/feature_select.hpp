#pragma once

#include <cstdint>
#include <vector>

#include "iotids/dataset.hpp"
#include "iotids/tree.hpp"

namespace iotids {

struct FeatureSubset {
    // original column indices of the k survivors, ascending
    std::vector<int> selected;
    // per original column: 1 for survivors, 1 + elimination round otherwise
    // (the first feature eliminated has rank 2)
    std::vector<int> ranking;
};

struct RfeOptions {
    RfHyperParams ranking_params;  // forest used for the importance ranking
    int step = 1;                  // features eliminated per round
    // seeded stratified row subsample used for the ranking fits only;
    // <= 0 disables subsampling
    Eigen::Index ranking_subsample = 20000;
};

// Repeatedly fits the ranking forest on the surviving features and drops the
// least important one(s) until k remain. Importance ties are broken by
// eliminating the highest column index first.
FeatureSubset rfe_select(const Dataset& ds, int k, std::uint64_t seed,
                         const RfeOptions& options = {});

}  // namespace iotids
