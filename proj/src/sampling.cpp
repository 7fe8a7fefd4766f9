#include "iotids/sampling.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "iotids/errors.hpp"
#include "iotids/rng.hpp"

namespace iotids {

namespace {

std::vector<Eigen::Index> rows_of_class(const Dataset& ds, int cls) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < ds.n(); ++i)
        if (ds.y[i] == cls) rows.push_back(i);
    return rows;
}

// Seeded uniform m-subset of the class rows, returned in original order.
std::vector<Eigen::Index> draw_kept_rows(std::vector<Eigen::Index> cls_rows, std::int64_t m,
                                         Rng& rng) {
    rng.shuffle(cls_rows);
    cls_rows.resize(static_cast<std::size_t>(m));
    std::sort(cls_rows.begin(), cls_rows.end());
    return cls_rows;
}

struct SynthRow {
    Eigen::RowVectorXd x;
    Eigen::Index base;  // row index into the matrix passed to synthesize()
    Eigen::Index neighbor;
    double u;
};

// Draws `count` interpolated rows. Neighbor lists are computed lazily per base
// row: the min(k, n_c - 1) nearest same-class rows under Euclidean distance,
// ties resolved toward the lower row index.
std::vector<SynthRow> synthesize(const Eigen::MatrixXd& X,
                                 const std::vector<Eigen::Index>& cls_rows, std::int64_t count,
                                 int k, Rng& rng) {
    const std::size_t n_c = cls_rows.size();
    std::vector<SynthRow> out;
    out.reserve(static_cast<std::size_t>(count));

    if (n_c == 1) {
        for (std::int64_t t = 0; t < count; ++t)
            out.push_back({X.row(cls_rows[0]), cls_rows[0], cls_rows[0], 0.0});
        return out;
    }

    const std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k), n_c - 1);
    std::map<std::size_t, std::vector<Eigen::Index>> neighbor_cache;

    for (std::int64_t t = 0; t < count; ++t) {
        const std::size_t base = static_cast<std::size_t>(rng.below(n_c));
        auto it = neighbor_cache.find(base);
        if (it == neighbor_cache.end()) {
            std::vector<std::pair<double, Eigen::Index>> dist;
            dist.reserve(n_c - 1);
            for (std::size_t j = 0; j < n_c; ++j) {
                if (j == base) continue;
                dist.push_back({(X.row(cls_rows[j]) - X.row(cls_rows[base])).squaredNorm(),
                                cls_rows[j]});
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_eff),
                              dist.end());
            std::vector<Eigen::Index> nbs(k_eff);
            for (std::size_t j = 0; j < k_eff; ++j) nbs[j] = dist[j].second;
            it = neighbor_cache.emplace(base, std::move(nbs)).first;
        }
        const Eigen::Index nb = it->second[static_cast<std::size_t>(rng.below(k_eff))];
        const double u = rng.uniform();
        SynthRow row;
        row.base = cls_rows[base];
        row.neighbor = nb;
        row.u = u;
        row.x = X.row(row.base) + u * (X.row(nb) - X.row(row.base));
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

Dataset undersample(const Dataset& ds, int cls, std::int64_t m, std::uint64_t seed) {
    ds.validate();
    if (cls < 0 || cls >= ds.n_classes()) throw UsageError("class index out of range");
    auto cls_rows = rows_of_class(ds, cls);
    if (m < 0 || m > static_cast<std::int64_t>(cls_rows.size()))
        throw DataError("cannot undersample class " + std::to_string(cls) + " of size " +
                        std::to_string(cls_rows.size()) + " to " + std::to_string(m));

    Rng rng(seed);
    auto kept = draw_kept_rows(std::move(cls_rows), m, rng);

    std::vector<Eigen::Index> rows;
    std::size_t kept_pos = 0;
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
        if (ds.y[i] != cls) {
            rows.push_back(i);
        } else if (kept_pos < kept.size() && kept[kept_pos] == i) {
            rows.push_back(i);
            kept_pos++;
        }
    }
    return ds.select_rows(rows);
}

Dataset smote_oversample(const Dataset& ds, int cls, std::int64_t m, int k, std::uint64_t seed,
                         std::vector<SyntheticRecord>* provenance) {
    ds.validate();
    if (cls < 0 || cls >= ds.n_classes()) throw UsageError("class index out of range");
    if (k < 1) throw UsageError("k_neighbors must be >= 1");
    const auto cls_rows = rows_of_class(ds, cls);
    if (cls_rows.empty()) throw DataError("class " + std::to_string(cls) + " has no instances");
    if (m < static_cast<std::int64_t>(cls_rows.size()))
        throw DataError("smote_oversample never removes rows: target " + std::to_string(m) +
                        " < class size " + std::to_string(cls_rows.size()));

    const std::int64_t count = m - static_cast<std::int64_t>(cls_rows.size());
    Rng rng(seed);
    const auto synth = synthesize(ds.X, cls_rows, count, k, rng);

    Dataset out;
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    out.X.resize(ds.n() + count, ds.d());
    out.y.resize(ds.n() + count);
    out.X.topRows(ds.n()) = ds.X;
    out.y.head(ds.n()) = ds.y;
    for (std::int64_t t = 0; t < count; ++t) {
        out.X.row(ds.n() + t) = synth[static_cast<std::size_t>(t)].x;
        out.y[ds.n() + t] = cls;
        if (provenance)
            provenance->push_back({ds.n() + t, synth[static_cast<std::size_t>(t)].base,
                                   synth[static_cast<std::size_t>(t)].neighbor,
                                   synth[static_cast<std::size_t>(t)].u});
    }
    return out;
}

Dataset hybrid_resample(const Dataset& train, const SamplingPlan& plan,
                        std::vector<SyntheticRecord>* provenance) {
    train.validate();
    if (plan.target_per_class < 1) throw UsageError("target_per_class must be >= 1");
    if (plan.k_neighbors < 1) throw UsageError("k_neighbors must be >= 1");

    const int c = train.n_classes();
    const std::int64_t target = plan.target_per_class;

    // pass 1: per-class kept rows (classes absent from the split are skipped)
    std::vector<Eigen::Index> kept;
    std::vector<std::vector<Eigen::Index>> kept_by_class(static_cast<std::size_t>(c));
    for (int cls = 0; cls < c; ++cls) {
        auto cls_rows = rows_of_class(train, cls);
        if (cls_rows.empty()) continue;
        if (static_cast<std::int64_t>(cls_rows.size()) > target) {
            Rng rng(Rng::mix(plan.seed, static_cast<std::uint64_t>(cls)));
            cls_rows = draw_kept_rows(std::move(cls_rows), target, rng);
        }
        kept_by_class[static_cast<std::size_t>(cls)] = cls_rows;
        kept.insert(kept.end(), cls_rows.begin(), cls_rows.end());
    }
    std::sort(kept.begin(), kept.end());

    // original row index -> position in the assembled output
    std::map<Eigen::Index, Eigen::Index> position;
    for (std::size_t i = 0; i < kept.size(); ++i)
        position[kept[i]] = static_cast<Eigen::Index>(i);

    // pass 2: synthesize minority rows against the kept originals
    std::vector<std::pair<int, SynthRow>> synthetic;
    for (int cls = 0; cls < c; ++cls) {
        const auto& cls_rows = kept_by_class[static_cast<std::size_t>(cls)];
        if (cls_rows.empty() || static_cast<std::int64_t>(cls_rows.size()) >= target) continue;
        Rng rng(Rng::mix(plan.seed, static_cast<std::uint64_t>(cls)));
        for (auto& row : synthesize(train.X, cls_rows,
                                    target - static_cast<std::int64_t>(cls_rows.size()),
                                    plan.k_neighbors, rng))
            synthetic.emplace_back(cls, std::move(row));
    }

    Dataset out;
    out.feature_names = train.feature_names;
    out.class_names = train.class_names;
    const Eigen::Index n_out =
        static_cast<Eigen::Index>(kept.size() + synthetic.size());
    out.X.resize(n_out, train.d());
    out.y.resize(n_out);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = train.X.row(kept[i]);
        out.y[static_cast<Eigen::Index>(i)] = train.y[kept[i]];
    }
    for (std::size_t i = 0; i < synthetic.size(); ++i) {
        const Eigen::Index row = static_cast<Eigen::Index>(kept.size() + i);
        out.X.row(row) = synthetic[i].second.x;
        out.y[row] = synthetic[i].first;
        if (provenance)
            provenance->push_back({row, position.at(synthetic[i].second.base),
                                   position.at(synthetic[i].second.neighbor),
                                   synthetic[i].second.u});
    }
    return out;
}

}  // namespace iotids
