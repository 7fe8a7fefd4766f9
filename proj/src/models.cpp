#include "iotids/models.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "iotids/errors.hpp"
#include "iotids/rng.hpp"

namespace iotids {

ModelSpec ModelSpec::random_forest(RfHyperParams p) {
    ModelSpec s;
    s.kind = Kind::RandomForest;
    s.rf = p;
    return s;
}

ModelSpec ModelSpec::knn_spec(int k) {
    ModelSpec s;
    s.kind = Kind::Knn;
    s.knn.k = k;
    return s;
}

ModelSpec ModelSpec::logreg_spec(LogRegParams p) {
    ModelSpec s;
    s.kind = Kind::LogReg;
    s.logreg = p;
    return s;
}

ModelSpec ModelSpec::mlp_spec(MlpParams p) {
    ModelSpec s;
    s.kind = Kind::Mlp;
    s.mlp = p;
    return s;
}

ModelSpec ModelSpec::soft_voting(std::vector<ModelSpec> members) {
    ModelSpec s;
    s.kind = Kind::SoftVoting;
    s.members = std::move(members);
    return s;
}

std::string ModelSpec::name() const {
    switch (kind) {
        case Kind::RandomForest: return "rf";
        case Kind::Knn: return "knn";
        case Kind::LogReg: return "logreg";
        case Kind::Mlp: return "mlp";
        case Kind::SoftVoting: return "voting";
    }
    return "unknown";
}

void ModelSpec::validate() const {
    switch (kind) {
        case Kind::RandomForest:
            if (rf.n_estimators < 1 || rf.max_depth < 1 || rf.min_samples_split < 2 ||
                rf.min_samples_leaf < 1)
                throw UsageError("invalid random forest hyperparameters");
            break;
        case Kind::Knn:
            if (knn.k < 1) throw UsageError("knn k must be >= 1");
            break;
        case Kind::LogReg:
            if (logreg.l2 < 0 || logreg.lr <= 0 || logreg.max_iter < 1 || logreg.tol <= 0)
                throw UsageError("invalid logistic regression hyperparameters");
            break;
        case Kind::Mlp:
            if (mlp.hidden < 1 || mlp.lr <= 0 || mlp.momentum < 0 || mlp.momentum >= 1 ||
                mlp.batch < 1 || mlp.max_epochs < 1 || mlp.patience < 1)
                throw UsageError("invalid mlp hyperparameters");
            break;
        case Kind::SoftVoting:
            if (members.empty()) throw UsageError("soft voting needs at least one member");
            for (const auto& m : members) {
                if (m.kind == Kind::SoftVoting)
                    throw UsageError("nested soft voting is not supported");
                m.validate();
            }
            break;
    }
}

// --- prediction ---

Eigen::MatrixXd RandomForestModel::predict_proba(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd proba = Eigen::MatrixXd::Zero(X.rows(), n_classes);
    for (const auto& tree : trees)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            proba.row(i) += tree.predict_proba_row(X.row(i)).transpose();
    proba /= static_cast<double>(trees.size());
    return proba;
}

Eigen::MatrixXd KnnModel::predict_proba(const Eigen::MatrixXd& X) const {
    const Eigen::Index n_train = train_X.rows();
    const int kk = static_cast<int>(std::min<Eigen::Index>(k, n_train));
    Eigen::MatrixXd proba = Eigen::MatrixXd::Zero(X.rows(), n_classes);

    const Eigen::VectorXd train_norms = train_X.rowwise().squaredNorm();
    const Eigen::Index block = 256;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_train));

    for (Eigen::Index start = 0; start < X.rows(); start += block) {
        const Eigen::Index rows = std::min(block, X.rows() - start);
        // squared distances via the gram trick; query norms cancel in ranking
        Eigen::MatrixXd d2 = -2.0 * X.middleRows(start, rows) * train_X.transpose();
        d2.rowwise() += train_norms.transpose();

        for (Eigen::Index r = 0; r < rows; ++r) {
            std::iota(order.begin(), order.end(), Eigen::Index{0});
            std::partial_sort(order.begin(), order.begin() + kk, order.end(),
                              [&](Eigen::Index a, Eigen::Index b) {
                                  if (d2(r, a) != d2(r, b)) return d2(r, a) < d2(r, b);
                                  return a < b;  // distance ties: lower train index
                              });
            for (int i = 0; i < kk; ++i) proba(start + r, train_y[order[static_cast<std::size_t>(i)]]) += 1.0;
            proba.row(start + r) /= static_cast<double>(kk);
        }
    }
    return proba;
}

Eigen::MatrixXd VotingModel::predict_proba(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd proba = members.front().predict_proba(X);
    for (std::size_t i = 1; i < members.size(); ++i) proba += members[i].predict_proba(X);
    return proba / static_cast<double>(members.size());
}

Eigen::MatrixXd TrainedModel::predict_proba(const Eigen::MatrixXd& X) const {
    if (!impl) throw DataError("model is not fitted");
    if (X.cols() != static_cast<Eigen::Index>(expected_features.size()))
        throw DataError("feature count mismatch: got " + std::to_string(X.cols()) +
                        ", model expects " + std::to_string(expected_features.size()));
    return impl->predict_proba(X);
}

Eigen::VectorXi TrainedModel::predict(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd proba = predict_proba(X);
    Eigen::VectorXi labels(proba.rows());
    for (Eigen::Index i = 0; i < proba.rows(); ++i) {
        int best = 0;
        for (int c = 1; c < proba.cols(); ++c)
            if (proba(i, c) > proba(i, best)) best = c;
        labels[i] = best;
    }
    return labels;
}

// --- fitting ---

namespace {

std::shared_ptr<RandomForestModel> fit_random_forest(const RfHyperParams& params,
                                                     const Dataset& train, std::uint64_t seed) {
    auto model = std::make_shared<RandomForestModel>();
    model->params = params;
    model->n_classes = train.n_classes();

    const Eigen::Index n = train.n();
    const int mtry = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(train.d())))));
    Eigen::VectorXd importance = Eigen::VectorXd::Zero(train.d());

    std::vector<Eigen::Index> sample(static_cast<std::size_t>(n));
    for (int t = 0; t < params.n_estimators; ++t) {
        Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(t)));
        for (auto& s : sample)
            s = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        Eigen::VectorXd tree_importance = Eigen::VectorXd::Zero(train.d());
        model->trees.push_back(fit_tree(train.X, train.y, model->n_classes, params, sample, mtry,
                                        rng, &tree_importance));
        importance += tree_importance;
    }

    importance /= static_cast<double>(params.n_estimators);
    const double total = importance.sum();
    if (total > 0.0) importance /= total;
    model->feature_importance = importance;
    return model;
}

}  // namespace

// defined in linear.cpp
std::shared_ptr<LogRegModel> fit_logreg(const LogRegParams& params, const Dataset& train);
std::shared_ptr<MlpModel> fit_mlp(const MlpParams& params, const Dataset& train,
                                  std::uint64_t seed);

TrainedModel fit_classifier(const ModelSpec& spec, const Dataset& train, std::uint64_t seed) {
    spec.validate();
    train.validate();
    if (train.n() < 2) throw DataError("need at least 2 training rows");
    if (train.n_classes() < 2 &&
        (spec.kind == ModelSpec::Kind::LogReg || spec.kind == ModelSpec::Kind::Mlp))
        throw DataError(spec.name() + " requires at least 2 classes");

    const auto t0 = std::chrono::steady_clock::now();

    TrainedModel model;
    model.spec = spec;
    model.n_classes = train.n_classes();
    model.expected_features = train.feature_names;
    model.class_names = train.class_names;

    switch (spec.kind) {
        case ModelSpec::Kind::RandomForest:
            model.impl = fit_random_forest(spec.rf, train, seed);
            break;
        case ModelSpec::Kind::Knn: {
            auto knn = std::make_shared<KnnModel>();
            knn->k = spec.knn.k;
            knn->train_X = train.X;
            knn->train_y = train.y;
            knn->n_classes = train.n_classes();
            model.impl = knn;
            break;
        }
        case ModelSpec::Kind::LogReg:
            model.impl = fit_logreg(spec.logreg, train);
            break;
        case ModelSpec::Kind::Mlp:
            model.impl = fit_mlp(spec.mlp, train, seed);
            break;
        case ModelSpec::Kind::SoftVoting: {
            auto voting = std::make_shared<VotingModel>();
            for (std::size_t i = 0; i < spec.members.size(); ++i)
                voting->members.push_back(
                    fit_classifier(spec.members[i], train, Rng::mix(seed, 0x5000 + i)));
            model.impl = voting;
            break;
        }
    }

    model.training_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return model;
}

double accuracy_score(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred) {
    if (y_true.size() != y_pred.size() || y_true.size() == 0)
        throw DataError("accuracy_score: invalid input lengths");
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < y_true.size(); ++i)
        if (y_true[i] == y_pred[i]) hits++;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

std::vector<std::vector<Eigen::Index>> stratified_folds(const Eigen::VectorXi& y, int folds,
                                                        std::uint64_t seed) {
    if (folds < 2) throw UsageError("need at least 2 folds");
    if (folds > y.size()) throw UsageError("more folds than rows");

    const int c = y.size() > 0 ? y.maxCoeff() + 1 : 0;
    std::vector<std::vector<Eigen::Index>> by_class(static_cast<std::size_t>(c));
    for (Eigen::Index i = 0; i < y.size(); ++i)
        by_class[static_cast<std::size_t>(y[i])].push_back(i);

    std::vector<std::vector<Eigen::Index>> out(static_cast<std::size_t>(folds));
    for (int cls = 0; cls < c; ++cls) {
        auto& rows = by_class[static_cast<std::size_t>(cls)];
        Rng rng(Rng::mix(seed, 0x1000 + static_cast<std::uint64_t>(cls)));
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            out[i % static_cast<std::size_t>(folds)].push_back(rows[i]);
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

std::vector<double> cross_validate(const ModelSpec& spec, const Dataset& ds, int folds,
                                   std::uint64_t seed) {
    ds.validate();
    const auto fold_idx = stratified_folds(ds.y, folds, seed);

    std::vector<double> scores;
    for (std::size_t f = 0; f < fold_idx.size(); ++f) {
        std::vector<Eigen::Index> train_rows;
        for (std::size_t g = 0; g < fold_idx.size(); ++g)
            if (g != f) train_rows.insert(train_rows.end(), fold_idx[g].begin(), fold_idx[g].end());
        std::sort(train_rows.begin(), train_rows.end());

        const Dataset train = ds.select_rows(train_rows);
        const Dataset test = ds.select_rows(fold_idx[f]);
        TrainedModel model = fit_classifier(spec, train, Rng::mix(seed, 0x2000 + f));
        scores.push_back(accuracy_score(test.y, model.predict(test.X)));
    }
    return scores;
}

std::pair<ModelSpec, double> grid_search(const std::vector<ModelSpec>& grid, const Dataset& ds,
                                         int folds, std::uint64_t seed) {
    if (grid.empty()) throw UsageError("grid search needs a non-empty grid");

    std::size_t best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto scores = cross_validate(grid[i], ds, folds, seed);
        const double mean =
            std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
        if (mean > best_score) {  // ties keep the earliest spec
            best_score = mean;
            best = i;
        }
    }
    return {grid[best], best_score};
}

}  // namespace iotids
