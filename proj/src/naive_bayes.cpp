#include <algorithm>
#include <cmath>
#include <limits>

#include "dialectid/classifiers.hpp"
#include "dialectid/error.hpp"
#include "training_util.hpp"

namespace dialectid::classifiers {

std::vector<double> softmax(std::span<const double> scores) {
    std::vector<double> out(scores.size(), 0.0);
    if (scores.empty()) return out;
    const double max = *std::max_element(scores.begin(), scores.end());
    if (!std::isfinite(max)) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        return out;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - max);
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

std::size_t argmax(std::span<const double> row) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i] > row[best]) best = i;
    return best;
}

NBModel train_nb(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                 std::size_t n_classes, NBKind kind, double alpha) {
    detail::check_training_set(X, y, n_classes, "train_nb");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("train_nb: alpha must be > 0");

    const std::size_t V = X.front().dimension();
    const std::size_t K = n_classes;
    NBModel m;
    m.kind_ = kind;
    m.alpha_ = alpha;
    m.n_features_ = V;

    std::vector<double> class_docs(K, 0.0);
    std::vector<double> counts(K * V, 0.0);
    for (std::size_t i = 0; i < X.size(); ++i) {
        const auto c = y[i];
        class_docs[c] += 1.0;
        for (const auto& e : X[i].entries()) {
            if (kind == NBKind::multinomial && e.value < 0.0)
                throw ValidationError("train_nb: multinomial NB needs non-negative features");
            if (kind == NBKind::multinomial)
                counts[c * V + e.index] += e.value;
            else if (e.value > 0.0)
                counts[c * V + e.index] += 1.0;
        }
    }

    const double n = static_cast<double>(X.size());
    m.log_prior_.resize(K);
    for (std::size_t c = 0; c < K; ++c)
        m.log_prior_[c] = class_docs[c] > 0.0 ? std::log(class_docs[c] / n)
                                              : -std::numeric_limits<double>::infinity();

    m.log_prob_.resize(K * V);
    if (kind == NBKind::multinomial) {
        for (std::size_t c = 0; c < K; ++c) {
            double total = 0.0;
            for (std::size_t f = 0; f < V; ++f) total += counts[c * V + f];
            const double denom = total + alpha * static_cast<double>(V);
            for (std::size_t f = 0; f < V; ++f)
                m.log_prob_[c * V + f] = std::log((counts[c * V + f] + alpha) / denom);
        }
    } else {
        m.log_absent_.resize(K * V);
        m.absent_total_.assign(K, 0.0);
        for (std::size_t c = 0; c < K; ++c) {
            const double denom = class_docs[c] + 2.0 * alpha;
            for (std::size_t f = 0; f < V; ++f) {
                const double present = counts[c * V + f];
                m.log_prob_[c * V + f] = std::log((present + alpha) / denom);
                m.log_absent_[c * V + f] = std::log((class_docs[c] - present + alpha) / denom);
                m.absent_total_[c] += m.log_absent_[c * V + f];
            }
        }
    }
    return m;
}

std::vector<double> NBModel::joint_log_likelihood(const SparseVector& x) const {
    if (x.dimension() != n_features_)
        throw ValidationError("NB: feature dimension " + std::to_string(x.dimension()) +
                              " does not match the model's " + std::to_string(n_features_));
    const std::size_t K = n_classes();
    std::vector<double> jll(log_prior_);
    for (std::size_t c = 0; c < K; ++c) {
        if (!std::isfinite(jll[c])) continue;
        const double* lp = log_prob_.data() + c * n_features_;
        if (kind_ == NBKind::multinomial) {
            for (const auto& e : x.entries()) jll[c] += e.value * lp[e.index];
        } else {
            const double* la = log_absent_.data() + c * n_features_;
            jll[c] += absent_total_[c];
            for (const auto& e : x.entries())
                if (e.value > 0.0) jll[c] += lp[e.index] - la[e.index];
        }
    }
    return jll;
}

std::vector<double> NBModel::predict_proba(const SparseVector& x) const {
    return softmax(joint_log_likelihood(x));
}

void NBModel::write(BinaryWriter& w) const {
    w.u64(kind_ == NBKind::multinomial ? 0 : 1);
    w.f64(alpha_);
    w.u64(n_features_);
    w.f64s(log_prior_);
    w.f64s(log_prob_);
    w.f64s(log_absent_);
    w.f64s(absent_total_);
}

NBModel NBModel::read(BinaryReader& r) {
    NBModel m;
    const auto kind = r.u64();
    if (kind > 1) throw ValidationError("NB payload: bad kind");
    m.kind_ = kind == 0 ? NBKind::multinomial : NBKind::bernoulli;
    m.alpha_ = r.f64();
    m.n_features_ = r.u64();
    m.log_prior_ = r.f64s();
    m.log_prob_ = r.f64s();
    m.log_absent_ = r.f64s();
    m.absent_total_ = r.f64s();
    const std::size_t kv = m.log_prior_.size() * m.n_features_;
    if (m.log_prob_.size() != kv ||
        (m.kind_ == NBKind::bernoulli &&
         (m.log_absent_.size() != kv || m.absent_total_.size() != m.log_prior_.size())))
        throw ValidationError("NB payload: inconsistent sizes");
    return m;
}

OneVsRestNB train_nb_ovr(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                         std::size_t n_classes, NBKind kind, double alpha) {
    detail::check_training_set(X, y, n_classes, "train_nb_ovr");
    OneVsRestNB m;
    std::vector<LabelIndex> binary(y.size());
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t i = 0; i < y.size(); ++i) binary[i] = y[i] == c ? 1 : 0;
        m.binary_.push_back(train_nb(X, binary, 2, kind, alpha));
    }
    return m;
}

std::vector<double> OneVsRestNB::predict_proba(const SparseVector& x) const {
    std::vector<double> row(binary_.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < binary_.size(); ++c) {
        row[c] = binary_[c].predict_proba(x)[1];
        sum += row[c];
    }
    if (!(sum > 0.0)) return std::vector<double>(row.size(), 1.0 / static_cast<double>(row.size()));
    for (auto& v : row) v /= sum;
    return row;
}

void OneVsRestNB::write(BinaryWriter& w) const {
    w.u64(binary_.size());
    for (const auto& m : binary_) m.write(w);
}

OneVsRestNB OneVsRestNB::read(BinaryReader& r) {
    OneVsRestNB m;
    const auto n = r.size();
    for (std::size_t i = 0; i < n; ++i) m.binary_.push_back(NBModel::read(r));
    return m;
}

}  // namespace dialectid::classifiers
