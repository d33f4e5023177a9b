#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "dialectid/classifiers.hpp"
#include "dialectid/error.hpp"
#include "training_util.hpp"

namespace dialectid::classifiers {
namespace {

struct Layout {
    std::size_t D, H, K;
    std::size_t w1() const { return 0; }
    std::size_t b1() const { return H * D; }
    std::size_t w2() const { return H * D + H; }
    std::size_t b2() const { return H * D + H + K * H; }
    std::size_t total() const { return H * D + H + K * H + K; }
};

struct Activations {
    std::vector<double> pre;     // W1 x + b1
    std::vector<double> hidden;  // relu(pre) * mask
    std::vector<double> probs;
};

Activations run_forward(std::span<const double> p, const Layout& L, std::span<const double> x,
                        std::span<const double> mask) {
    Activations a;
    a.pre.resize(L.H);
    a.hidden.resize(L.H);
    for (std::size_t h = 0; h < L.H; ++h) {
        const double* w = p.data() + L.w1() + h * L.D;
        double z = p[L.b1() + h];
        for (std::size_t d = 0; d < L.D; ++d) z += w[d] * x[d];
        a.pre[h] = z;
        double act = z > 0.0 ? z : 0.0;
        if (!mask.empty()) act *= mask[h];
        a.hidden[h] = act;
    }
    std::vector<double> out(L.K);
    for (std::size_t k = 0; k < L.K; ++k) {
        const double* w = p.data() + L.w2() + k * L.H;
        double z = p[L.b2() + k];
        for (std::size_t h = 0; h < L.H; ++h) z += w[h] * a.hidden[h];
        out[k] = z;
    }
    a.probs = softmax(out);
    return a;
}

// Adds weight * d(cross-entropy)/d(params) for one example into grad.
double accumulate(std::span<const double> p, const Layout& L, std::span<const double> x,
                  LabelIndex label, std::span<const double> mask, double weight,
                  std::vector<double>* grad) {
    auto a = run_forward(p, L, x, mask);
    const double loss = -std::log(std::max(a.probs[label], 1e-300));
    if (!grad) return loss;
    auto& g = *grad;
    std::vector<double> dhidden(L.H, 0.0);
    for (std::size_t k = 0; k < L.K; ++k) {
        const double dz = weight * (a.probs[k] - (k == label ? 1.0 : 0.0));
        g[L.b2() + k] += dz;
        const double* w = p.data() + L.w2() + k * L.H;
        double* gw = g.data() + L.w2() + k * L.H;
        for (std::size_t h = 0; h < L.H; ++h) {
            gw[h] += dz * a.hidden[h];
            dhidden[h] += dz * w[h];
        }
    }
    for (std::size_t h = 0; h < L.H; ++h) {
        if (a.pre[h] <= 0.0) continue;
        double dz = dhidden[h];
        if (!mask.empty()) dz *= mask[h];
        if (dz == 0.0) continue;
        g[L.b1() + h] += dz;
        double* gw = g.data() + L.w1() + h * L.D;
        for (std::size_t d = 0; d < L.D; ++d) gw[d] += dz * x[d];
    }
    return loss;
}

double l2_penalty(std::span<const double> p, const Layout& L, double lambda,
                  std::vector<double>* grad) {
    if (lambda == 0.0) return 0.0;
    double s = 0.0;
    auto add = [&](std::size_t from, std::size_t n) {
        for (std::size_t i = from; i < from + n; ++i) {
            s += p[i] * p[i];
            if (grad) (*grad)[i] += lambda * p[i];
        }
    };
    add(L.w1(), L.H * L.D);
    add(L.w2(), L.K * L.H);
    return 0.5 * lambda * s;
}

void check_dense(std::span<const DenseVector> X, std::span<const LabelIndex> y,
                 std::size_t n_classes, const char* who) {
    if (X.empty()) throw ValidationError(std::string(who) + ": empty training set");
    if (X.size() != y.size()) throw ValidationError(std::string(who) + ": X and y differ in length");
    detail::check_labels(y, n_classes, who);
    for (const auto& x : X) {
        if (x.size() != X.front().size())
            throw ValidationError(std::string(who) + ": inconsistent input dimensions");
        for (double v : x)
            if (!std::isfinite(v)) throw ValidationError(std::string(who) + ": non-finite input value");
    }
}

}  // namespace

MLPModel::MLPModel(std::size_t n_inputs, std::size_t hidden, std::size_t n_classes, double dropout,
                   std::uint64_t seed)
    : n_inputs_(n_inputs), hidden_(hidden), n_classes_(n_classes), dropout_(dropout) {
    if (hidden == 0) throw ValidationError("MLP: hidden width must be >= 1");
    if (n_classes == 0) throw ValidationError("MLP: no classes");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("MLP: dropout must be in [0, 1)");
    const Layout L{n_inputs, hidden, n_classes};
    params_.assign(L.total(), 0.0);
    std::mt19937_64 rng(seed);
    const double lim1 = std::sqrt(6.0 / static_cast<double>(n_inputs + hidden));
    const double lim2 = std::sqrt(6.0 / static_cast<double>(hidden + n_classes));
    std::uniform_real_distribution<double> u1(-lim1, lim1), u2(-lim2, lim2);
    for (std::size_t i = 0; i < hidden * n_inputs; ++i) params_[L.w1() + i] = u1(rng);
    for (std::size_t i = 0; i < n_classes * hidden; ++i) params_[L.w2() + i] = u2(rng);
}

std::vector<double> MLPModel::forward(std::span<const double> x, std::span<const double> mask) const {
    if (x.size() != n_inputs_)
        throw ValidationError("MLP: input dimension " + std::to_string(x.size()) +
                              " does not match the model's " + std::to_string(n_inputs_));
    if (!mask.empty() && mask.size() != hidden_) throw ValidationError("MLP: bad dropout mask size");
    return run_forward(params_, Layout{n_inputs_, hidden_, n_classes_}, x, mask).probs;
}

std::vector<double> MLPModel::predict_proba(std::span<const double> x) const { return forward(x, {}); }

void MLPModel::write(BinaryWriter& w) const {
    w.u64(n_inputs_);
    w.u64(hidden_);
    w.u64(n_classes_);
    w.f64(dropout_);
    w.f64s(params_);
}

MLPModel MLPModel::read(BinaryReader& r) {
    MLPModel m;
    m.n_inputs_ = r.u64();
    m.hidden_ = r.u64();
    m.n_classes_ = r.u64();
    m.dropout_ = r.f64();
    m.params_ = r.f64s();
    if (m.params_.size() != Layout{m.n_inputs_, m.hidden_, m.n_classes_}.total())
        throw ValidationError("MLP payload: inconsistent sizes");
    return m;
}

double mlp_objective(const MLPModel& model, std::span<const DenseVector> X,
                     std::span<const LabelIndex> y, std::span<const std::vector<double>> masks,
                     double lambda, std::vector<double>* grad) {
    check_dense(X, y, model.n_classes(), "mlp_objective");
    if (!masks.empty() && masks.size() != X.size())
        throw ValidationError("mlp_objective: one dropout mask per example expected");
    const Layout L{model.n_inputs_, model.hidden_, model.n_classes_};
    if (X.front().size() != L.D) throw ValidationError("mlp_objective: input dimension mismatch");
    if (grad) grad->assign(L.total(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(X.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        std::span<const double> mask = masks.empty() ? std::span<const double>{} : masks[i];
        loss += inv_n * accumulate(model.params_, L, X[i], y[i], mask, inv_n, grad);
    }
    return loss + l2_penalty(model.params_, L, lambda, grad);
}

MLPModel train_mlp(std::span<const DenseVector> X, std::span<const LabelIndex> y,
                   std::size_t n_classes, const MLPConfig& cfg) {
    check_dense(X, y, n_classes, "train_mlp");
    if (cfg.epochs == 0 || cfg.batch_size == 0)
        throw ValidationError("train_mlp: epochs and batch_size must be >= 1");
    if (!(cfg.step > 0.0) || !(cfg.lambda >= 0.0))
        throw ValidationError("train_mlp: need step > 0 and lambda >= 0");

    MLPModel model(X.front().size(), cfg.hidden, n_classes, cfg.dropout, cfg.seed);
    const Layout L{model.n_inputs(), model.hidden(), model.n_classes()};
    auto params = model.parameters();

    std::mt19937_64 rng(cfg.seed + 0x9E3779B97F4A7C15ULL);
    std::bernoulli_distribution keep(1.0 - cfg.dropout);
    const double keep_scale = 1.0 / (1.0 - cfg.dropout);

    std::vector<std::size_t> order(X.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(L.total());
    std::vector<double> mask(L.H, 1.0);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double inv_b = 1.0 / static_cast<double>(end - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t j = start; j < end; ++j) {
                if (cfg.dropout > 0.0)
                    for (auto& m : mask) m = keep(rng) ? keep_scale : 0.0;
                accumulate(params, L, X[order[j]], y[order[j]],
                           cfg.dropout > 0.0 ? std::span<const double>(mask) : std::span<const double>{},
                           inv_b, &grad);
            }
            l2_penalty(params, L, cfg.lambda, &grad);
            for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg.step * grad[i];
        }
    }
    for (double v : params)
        if (!std::isfinite(v)) throw ValidationError("train_mlp: weights diverged");
    return model;
}

}  // namespace dialectid::classifiers
