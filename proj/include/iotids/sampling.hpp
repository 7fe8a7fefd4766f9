#pragma once

#include <cstdint>
#include <vector>

#include "iotids/dataset.hpp"

namespace iotids {

struct SamplingPlan {
    std::int64_t target_per_class = 10000;
    int k_neighbors = 5;
    std::uint64_t seed = 42;
};

// Provenance of one synthetic row: s = X.row(base) + u * (X.row(neighbor) - X.row(base)).
// base/neighbor index into the dataset returned alongside the records (for
// smote_oversample that matches the input, which is a prefix of the output).
struct SyntheticRecord {
    Eigen::Index output_row;
    Eigen::Index base_row;
    Eigen::Index neighbor_row;
    double u;
};

// Keeps m uniformly chosen (without replacement) class-c rows, drops the rest
// of class c, leaves other classes untouched. Surviving rows keep their
// original relative order.
Dataset undersample(const Dataset& ds, int cls, std::int64_t m, std::uint64_t seed);

// Appends m - n_c synthetic class-c rows, each interpolated between a random
// class-c row and one of its min(k, n_c - 1) nearest same-class neighbors
// (Euclidean, distance ties to the lower row index). A lone instance is
// duplicated verbatim.
Dataset smote_oversample(const Dataset& ds, int cls, std::int64_t m, int k, std::uint64_t seed,
                         std::vector<SyntheticRecord>* provenance = nullptr);

// Under- or oversamples every class to exactly plan.target_per_class. Each
// class consumes a stream derived from (seed, class index).
Dataset hybrid_resample(const Dataset& train, const SamplingPlan& plan,
                        std::vector<SyntheticRecord>* provenance = nullptr);

}  // namespace iotids
