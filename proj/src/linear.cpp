// Multinomial logistic regression and the one-hidden-layer MLP.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "iotids/errors.hpp"
#include "iotids/models.hpp"
#include "iotids/rng.hpp"

namespace iotids {

namespace {

// row-wise stable softmax of logits
Eigen::MatrixXd softmax(Eigen::MatrixXd logits) {
    logits.colwise() -= logits.rowwise().maxCoeff();
    logits = logits.array().exp();
    logits.array().colwise() /= logits.rowwise().sum().array();
    return logits;
}

Eigen::MatrixXd one_hot(const Eigen::VectorXi& y, int n_classes) {
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(y.size(), n_classes);
    for (Eigen::Index i = 0; i < y.size(); ++i) Y(i, y[i]) = 1.0;
    return Y;
}

double cross_entropy(const Eigen::MatrixXd& proba, const Eigen::VectorXi& y) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        loss -= std::log(std::max(proba(i, y[i]), 1e-300));
    return loss / static_cast<double>(y.size());
}

}  // namespace

Eigen::MatrixXd LogRegModel::predict_proba(const Eigen::MatrixXd& X) const {
    return softmax((X * weights).rowwise() + bias);
}

Eigen::MatrixXd MlpModel::predict_proba(const Eigen::MatrixXd& X) const {
    const Eigen::MatrixXd hidden = ((X * w1).rowwise() + b1).cwiseMax(0.0);
    return softmax((hidden * w2).rowwise() + b2);
}

std::shared_ptr<LogRegModel> fit_logreg(const LogRegParams& params, const Dataset& train) {
    const Eigen::Index n = train.n();
    const int c = train.n_classes();
    const Eigen::MatrixXd Y = one_hot(train.y, c);

    auto model = std::make_shared<LogRegModel>();
    model->weights = Eigen::MatrixXd::Zero(train.d(), c);
    model->bias = Eigen::RowVectorXd::Zero(c);

    auto loss_at = [&](const Eigen::MatrixXd& W, const Eigen::RowVectorXd& b) {
        const Eigen::MatrixXd proba = softmax((train.X * W).rowwise() + b);
        return cross_entropy(proba, train.y) + 0.5 * params.l2 * W.squaredNorm();
    };

    double loss = loss_at(model->weights, model->bias);
    double step = params.lr;

    for (int iter = 0; iter < params.max_iter; ++iter) {
        const Eigen::MatrixXd proba = softmax((train.X * model->weights).rowwise() + model->bias);
        const Eigen::MatrixXd G = (proba - Y) / static_cast<double>(n);
        const Eigen::MatrixXd grad_w = train.X.transpose() * G + params.l2 * model->weights;
        const Eigen::RowVectorXd grad_b = G.colwise().sum();

        // accept only improving steps, halving on overshoot
        Eigen::MatrixXd W_new;
        Eigen::RowVectorXd b_new;
        double loss_new = 0.0;
        int halvings = 0;
        for (;; ++halvings) {
            W_new = model->weights - step * grad_w;
            b_new = model->bias - step * grad_b;
            loss_new = loss_at(W_new, b_new);
            if (!std::isfinite(loss_new))
                throw NumericError("logistic regression diverged at iteration " +
                                   std::to_string(iter));
            if (loss_new <= loss || halvings >= 50) break;
            step *= 0.5;
        }
        if (loss_new > loss) break;  // no descent direction at the smallest step

        model->weights = std::move(W_new);
        model->bias = std::move(b_new);
        const double improvement = loss - loss_new;
        loss = loss_new;
        if (improvement < params.tol) break;
    }
    return model;
}

// --- MLP ---

MlpWeights mlp_init(Eigen::Index d, int hidden, int n_classes, Rng& rng) {
    auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols) {
        const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                m(i, j) = (2.0 * rng.uniform() - 1.0) * limit;
        return m;
    };
    MlpWeights w;
    w.w1 = glorot(d, hidden);
    w.b1 = Eigen::RowVectorXd::Zero(hidden);
    w.w2 = glorot(hidden, n_classes);
    w.b2 = Eigen::RowVectorXd::Zero(n_classes);
    return w;
}

double mlp_loss(const MlpWeights& w, const Eigen::MatrixXd& X, const Eigen::VectorXi& y) {
    const Eigen::MatrixXd hidden = ((X * w.w1).rowwise() + w.b1).cwiseMax(0.0);
    const Eigen::MatrixXd proba = softmax((hidden * w.w2).rowwise() + w.b2);
    return cross_entropy(proba, y);
}

MlpWeights mlp_gradient(const MlpWeights& w, const Eigen::MatrixXd& X, const Eigen::VectorXi& y) {
    const Eigen::Index n = X.rows();
    const Eigen::MatrixXd pre = (X * w.w1).rowwise() + w.b1;
    const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
    const Eigen::MatrixXd proba = softmax((hidden * w.w2).rowwise() + w.b2);

    const Eigen::MatrixXd G =
        (proba - one_hot(y, static_cast<int>(w.w2.cols()))) / static_cast<double>(n);
    MlpWeights grad;
    grad.w2 = hidden.transpose() * G;
    grad.b2 = G.colwise().sum();
    const Eigen::MatrixXd GH =
        (G * w.w2.transpose()).cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    grad.w1 = X.transpose() * GH;
    grad.b1 = GH.colwise().sum();
    return grad;
}

std::shared_ptr<MlpModel> fit_mlp(const MlpParams& params, const Dataset& train,
                                  std::uint64_t seed) {
    const Eigen::Index n = train.n();
    const int c = train.n_classes();

    // 10% seeded validation split for early stopping
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    Rng split_rng(Rng::mix(seed, 0xA11));
    split_rng.shuffle(idx);
    const std::size_t n_val = static_cast<std::size_t>(std::floor(0.1 * static_cast<double>(n)));
    std::vector<Eigen::Index> val_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
    std::vector<Eigen::Index> fit_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
    const bool early_stop = !val_idx.empty();

    Eigen::MatrixXd val_X;
    Eigen::VectorXi val_y;
    if (early_stop) {
        val_X.resize(static_cast<Eigen::Index>(val_idx.size()), train.d());
        val_y.resize(static_cast<Eigen::Index>(val_idx.size()));
        for (std::size_t i = 0; i < val_idx.size(); ++i) {
            val_X.row(static_cast<Eigen::Index>(i)) = train.X.row(val_idx[i]);
            val_y[static_cast<Eigen::Index>(i)] = train.y[val_idx[i]];
        }
    }

    Rng rng(Rng::mix(seed, 0xB17));
    MlpWeights w = mlp_init(train.d(), params.hidden, c, rng);
    MlpWeights velocity{Eigen::MatrixXd::Zero(train.d(), params.hidden),
                        Eigen::RowVectorXd::Zero(params.hidden),
                        Eigen::MatrixXd::Zero(params.hidden, c), Eigen::RowVectorXd::Zero(c)};

    MlpWeights best = w;
    double best_val = std::numeric_limits<double>::infinity();
    int wait = 0;

    Eigen::MatrixXd batch_X;
    Eigen::VectorXi batch_y;
    for (int epoch = 0; epoch < params.max_epochs; ++epoch) {
        rng.shuffle(fit_idx);
        for (std::size_t start = 0; start < fit_idx.size();
             start += static_cast<std::size_t>(params.batch)) {
            const std::size_t sz =
                std::min(static_cast<std::size_t>(params.batch), fit_idx.size() - start);
            batch_X.resize(static_cast<Eigen::Index>(sz), train.d());
            batch_y.resize(static_cast<Eigen::Index>(sz));
            for (std::size_t i = 0; i < sz; ++i) {
                batch_X.row(static_cast<Eigen::Index>(i)) = train.X.row(fit_idx[start + i]);
                batch_y[static_cast<Eigen::Index>(i)] = train.y[fit_idx[start + i]];
            }
            const MlpWeights grad = mlp_gradient(w, batch_X, batch_y);
            velocity.w1 = params.momentum * velocity.w1 - params.lr * grad.w1;
            velocity.b1 = params.momentum * velocity.b1 - params.lr * grad.b1;
            velocity.w2 = params.momentum * velocity.w2 - params.lr * grad.w2;
            velocity.b2 = params.momentum * velocity.b2 - params.lr * grad.b2;
            w.w1 += velocity.w1;
            w.b1 += velocity.b1;
            w.w2 += velocity.w2;
            w.b2 += velocity.b2;
        }

        const double check_loss =
            early_stop ? mlp_loss(w, val_X, val_y) : mlp_loss(w, train.X, train.y);
        if (!std::isfinite(check_loss))
            throw NumericError("mlp diverged at epoch " + std::to_string(epoch));
        if (check_loss < best_val - 1e-12) {
            best_val = check_loss;
            best = w;
            wait = 0;
        } else if (early_stop && ++wait >= params.patience) {
            break;
        }
    }

    auto model = std::make_shared<MlpModel>();
    model->w1 = std::move(best.w1);
    model->b1 = std::move(best.b1);
    model->w2 = std::move(best.w2);
    model->b2 = std::move(best.b2);
    return model;
}

}  // namespace iotids
