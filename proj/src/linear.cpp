#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dialectid/classifiers.hpp"
#include "dialectid/error.hpp"
#include "training_util.hpp"

namespace dialectid::classifiers {

LinearModel::LinearModel(std::size_t n_classes, std::size_t n_features, LinearLoss loss)
    : n_classes_(n_classes),
      n_features_(n_features),
      loss_(loss),
      weights_(n_classes * (n_features + 1), 0.0) {}

std::vector<double> LinearModel::scores(const SparseVector& x) const {
    if (x.dimension() != n_features_)
        throw ValidationError("linear model: feature dimension " + std::to_string(x.dimension()) +
                              " does not match the model's " + std::to_string(n_features_));
    std::vector<double> s(n_classes_);
    for (std::size_t c = 0; c < n_classes_; ++c) {
        const double* w = weights_.data() + c * (n_features_ + 1);
        double v = w[n_features_];
        for (const auto& e : x.entries()) v += w[e.index] * e.value;
        s[c] = v;
    }
    return s;
}

std::vector<double> LinearModel::predict_proba(const SparseVector& x) const {
    auto s = scores(x);
    if (loss_ == LinearLoss::softmax) return softmax(s);
    std::vector<double> row(n_classes_, 0.0);
    row[argmax(s)] = 1.0;
    return row;
}

void LinearModel::write(BinaryWriter& w) const {
    w.u64(n_classes_);
    w.u64(n_features_);
    w.u64(loss_ == LinearLoss::softmax ? 0 : 1);
    w.f64s(weights_);
}

LinearModel LinearModel::read(BinaryReader& r) {
    LinearModel m;
    m.n_classes_ = r.u64();
    m.n_features_ = r.u64();
    const auto loss = r.u64();
    if (loss > 1) throw ValidationError("linear payload: bad loss");
    m.loss_ = loss == 0 ? LinearLoss::softmax : LinearLoss::hinge;
    m.weights_ = r.f64s();
    if (m.weights_.size() != m.n_classes_ * (m.n_features_ + 1))
        throw ValidationError("linear payload: inconsistent sizes");
    return m;
}

namespace {

// d loss / d score for one example, written into `residual`. Returns the loss.
double score_residual(LinearLoss loss, std::span<const double> scores, LabelIndex label,
                      std::vector<double>& residual) {
    const std::size_t K = scores.size();
    residual.assign(K, 0.0);
    if (loss == LinearLoss::softmax) {
        auto p = softmax(scores);
        for (std::size_t c = 0; c < K; ++c) residual[c] = p[c] - (c == label ? 1.0 : 0.0);
        return -std::log(std::max(p[label], 1e-300));
    }
    double total = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
        const double t = c == label ? 1.0 : -1.0;
        const double margin = t * scores[c];
        if (margin < 1.0) {
            total += 1.0 - margin;
            residual[c] = -t;
        }
    }
    return total;
}

}  // namespace

double linear_objective(const LinearModel& model, std::span<const SparseVector> X,
                        std::span<const LabelIndex> y, double lambda, std::vector<double>* grad) {
    detail::check_training_set(X, y, model.n_classes(), "linear_objective");
    const std::size_t K = model.n_classes();
    const std::size_t D = model.n_features();
    const double inv_n = 1.0 / static_cast<double>(X.size());
    if (grad) grad->assign(model.weights().size(), 0.0);

    double loss = 0.0;
    std::vector<double> residual;
    for (std::size_t i = 0; i < X.size(); ++i) {
        auto s = model.scores(X[i]);
        loss += score_residual(model.loss(), s, y[i], residual) * inv_n;
        if (!grad) continue;
        for (std::size_t c = 0; c < K; ++c) {
            double* g = grad->data() + c * (D + 1);
            const double r = residual[c] * inv_n;
            for (const auto& e : X[i].entries()) g[e.index] += r * e.value;
            g[D] += r;
        }
    }
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t f = 0; f < D; ++f) {
            const double w = model.weight(c, f);
            loss += 0.5 * lambda * w * w;
            if (grad) (*grad)[c * (D + 1) + f] += lambda * w;
        }
    }
    return loss;
}

LinearModel train_linear(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                         std::size_t n_classes, const LinearConfig& cfg) {
    detail::check_training_set(X, y, n_classes, "train_linear");
    if (cfg.epochs == 0) throw ValidationError("train_linear: epochs must be >= 1");
    if (cfg.batch_size == 0) throw ValidationError("train_linear: batch_size must be >= 1");
    if (!(cfg.step > 0.0) || !(cfg.lambda >= 0.0) || cfg.step * cfg.lambda >= 1.0)
        throw ValidationError("train_linear: need step > 0, lambda >= 0 and step * lambda < 1");

    const std::size_t K = n_classes;
    const std::size_t D = X.front().dimension();
    LinearModel model(K, D, cfg.loss);
    auto w = model.weights();

    // Non-bias weights are stored as scale * w so the L2 shrinkage is O(1)
    // per step instead of O(K D).
    double scale = 1.0;
    const double decay = 1.0 - cfg.step * cfg.lambda;

    std::vector<std::size_t> order(X.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(cfg.seed);

    std::vector<double> scores(K);
    std::vector<double> residual;
    std::vector<std::vector<double>> batch_residuals;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double inv_b = 1.0 / static_cast<double>(end - start);

            batch_residuals.clear();
            for (std::size_t j = start; j < end; ++j) {
                const auto& x = X[order[j]];
                for (std::size_t c = 0; c < K; ++c) {
                    const double* wc = w.data() + c * (D + 1);
                    double v = 0.0;
                    for (const auto& e : x.entries()) v += wc[e.index] * e.value;
                    scores[c] = scale * v + wc[D];
                }
                score_residual(cfg.loss, scores, y[order[j]], residual);
                batch_residuals.push_back(residual);
            }

            scale *= decay;
            for (std::size_t j = start; j < end; ++j) {
                const auto& x = X[order[j]];
                const auto& r = batch_residuals[j - start];
                for (std::size_t c = 0; c < K; ++c) {
                    if (r[c] == 0.0) continue;
                    double* wc = w.data() + c * (D + 1);
                    const double g = cfg.step * r[c] * inv_b;
                    for (const auto& e : x.entries()) wc[e.index] -= g * e.value / scale;
                    wc[D] -= g;
                }
            }
            if (scale < 1e-6) {
                for (std::size_t c = 0; c < K; ++c)
                    for (std::size_t f = 0; f < D; ++f) w[c * (D + 1) + f] *= scale;
                scale = 1.0;
            }
        }
    }
    for (std::size_t c = 0; c < K; ++c)
        for (std::size_t f = 0; f < D; ++f) w[c * (D + 1) + f] *= scale;
    for (double v : w)
        if (!std::isfinite(v)) throw ValidationError("train_linear: weights diverged");
    return model;
}

}  // namespace dialectid::classifiers
