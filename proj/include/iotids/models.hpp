#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "iotids/dataset.hpp"
#include "iotids/tree.hpp"

namespace iotids {

struct KnnParams {
    int k = 5;
};

struct LogRegParams {
    double l2 = 1e-4;
    double lr = 0.1;
    int max_iter = 500;
    double tol = 1e-6;
};

struct MlpParams {
    int hidden = 100;
    double lr = 0.001;
    double momentum = 0.9;
    int batch = 200;
    int max_epochs = 200;
    int patience = 10;
};

// Tagged model description. `members` is used by SoftVoting only.
struct ModelSpec {
    enum class Kind { RandomForest, Knn, LogReg, Mlp, SoftVoting };

    Kind kind = Kind::RandomForest;
    RfHyperParams rf;
    KnnParams knn;
    LogRegParams logreg;
    MlpParams mlp;
    std::vector<ModelSpec> members;

    static ModelSpec random_forest(RfHyperParams p = {});
    static ModelSpec knn_spec(int k);
    static ModelSpec logreg_spec(LogRegParams p = {});
    static ModelSpec mlp_spec(MlpParams p = {});
    static ModelSpec soft_voting(std::vector<ModelSpec> members);

    // "rf", "knn", "logreg", "mlp", "voting"
    std::string name() const;
    void validate() const;  // throws UsageError
};

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const = 0;
};

struct TrainedModel {
    ModelSpec spec;
    std::shared_ptr<const Classifier> impl;
    int n_classes = 0;
    std::vector<std::string> expected_features;
    std::vector<std::string> class_names;
    double training_time_s = 0.0;

    // rows nonnegative, each summing to 1
    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
    // argmax per row, ties to the lowest class index
    Eigen::VectorXi predict(const Eigen::MatrixXd& X) const;
};

struct RandomForestModel final : Classifier {
    RfHyperParams params;
    std::vector<DecisionTree> trees;
    int n_classes = 0;
    Eigen::VectorXd feature_importance;  // mean impurity decrease, sums to 1

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
};

struct KnnModel final : Classifier {
    int k = 5;
    Eigen::MatrixXd train_X;
    Eigen::VectorXi train_y;
    int n_classes = 0;

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
};

struct LogRegModel final : Classifier {
    Eigen::MatrixXd weights;       // d x C
    Eigen::RowVectorXd bias;       // C

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
};

struct MlpModel final : Classifier {
    Eigen::MatrixXd w1;            // d x h
    Eigen::RowVectorXd b1;         // h
    Eigen::MatrixXd w2;            // h x C
    Eigen::RowVectorXd b2;         // C

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
};

struct VotingModel final : Classifier {
    std::vector<TrainedModel> members;

    Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const override;
};

// Deterministic given (spec, train, seed); wall-clock time recorded on the
// result. Voting members get member-index-derived seeds.
TrainedModel fit_classifier(const ModelSpec& spec, const Dataset& train, std::uint64_t seed);

// Stratified seeded k-fold indices: per class, shuffled rows dealt round-robin
// so fold sizes differ by at most one per class.
std::vector<std::vector<Eigen::Index>> stratified_folds(const Eigen::VectorXi& y, int folds,
                                                        std::uint64_t seed);

std::vector<double> cross_validate(const ModelSpec& spec, const Dataset& ds, int folds,
                                   std::uint64_t seed);

// Highest mean CV accuracy wins; ties go to the earliest spec.
std::pair<ModelSpec, double> grid_search(const std::vector<ModelSpec>& grid, const Dataset& ds,
                                         int folds, std::uint64_t seed);

double accuracy_score(const Eigen::VectorXi& y_true, const Eigen::VectorXi& y_pred);

// --- MLP internals, exposed for finite-difference gradient verification ---

struct MlpWeights {
    Eigen::MatrixXd w1;
    Eigen::RowVectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::RowVectorXd b2;
};

MlpWeights mlp_init(Eigen::Index d, int hidden, int n_classes, Rng& rng);
double mlp_loss(const MlpWeights& w, const Eigen::MatrixXd& X, const Eigen::VectorXi& y);
MlpWeights mlp_gradient(const MlpWeights& w, const Eigen::MatrixXd& X, const Eigen::VectorXi& y);

}  // namespace iotids
