#include <algorithm>
#include <numeric>

#include "dialectid/classifiers.hpp"
#include "dialectid/error.hpp"
#include "training_util.hpp"

namespace dialectid::classifiers {

// Multiclass k-NN votes already equal the renormalized one-vs-rest scores:
// each binary problem "c vs rest" sees the same k neighbours, so its positive
// score is votes(c)/k and those scores sum to 1.
KNNModel train_knn(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                   std::size_t n_classes, std::size_t k) {
    detail::check_training_set(X, y, n_classes, "train_knn");
    if (k == 0 || k > X.size())
        throw ValidationError("train_knn: k must be in [1, " + std::to_string(X.size()) + "]");
    KNNModel m;
    m.k_ = k;
    m.n_classes_ = n_classes;
    m.points_.assign(X.begin(), X.end());
    m.labels_.assign(y.begin(), y.end());
    m.norms_.reserve(X.size());
    for (const auto& x : X) m.norms_.push_back(x.norm());
    return m;
}

std::vector<double> KNNModel::predict_proba(const SparseVector& x) const {
    std::vector<double> row(n_classes_, 0.0);
    const double qn = x.norm();
    if (qn == 0.0) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n_classes_));
        return row;
    }
    if (!points_.empty() && x.dimension() != points_.front().dimension())
        throw ValidationError("KNN: feature dimension mismatch");

    std::vector<double> sim(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i)
        sim[i] = norms_[i] == 0.0 ? 0.0 : points_[i].dot(x) / (norms_[i] * qn);
    std::vector<std::size_t> idx(points_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k_), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (sim[a] != sim[b]) return sim[a] > sim[b];
                          return a < b;
                      });
    for (std::size_t j = 0; j < k_; ++j) row[labels_[idx[j]]] += 1.0;
    for (auto& v : row) v /= static_cast<double>(k_);
    return row;
}

void KNNModel::write(BinaryWriter& w) const {
    w.u64(k_);
    w.u64(n_classes_);
    w.u64(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        w.u64(p.dimension());
        w.u64(p.nnz());
        for (const auto& e : p.entries()) {
            w.u64(e.index);
            w.f64(e.value);
        }
        w.u64(labels_[i]);
    }
}

KNNModel KNNModel::read(BinaryReader& r) {
    KNNModel m;
    m.k_ = r.u64();
    m.n_classes_ = r.u64();
    const auto n = r.size_of(24);
    for (std::size_t i = 0; i < n; ++i) {
        const auto dim = r.u64();
        const auto nnz = r.size_of(16);
        std::vector<features::SparseEntry> entries(nnz);
        for (auto& e : entries) {
            e.index = r.u64();
            e.value = r.f64();
        }
        m.points_.emplace_back(dim, std::move(entries));
        m.norms_.push_back(m.points_.back().norm());
        const auto label = r.u64();
        if (label >= m.n_classes_) throw ValidationError("KNN payload: label out of range");
        m.labels_.push_back(label);
    }
    if (m.k_ == 0 || m.k_ > m.points_.size()) throw ValidationError("KNN payload: bad k");
    return m;
}

DummyModel train_dummy(std::span<const LabelIndex> y, std::size_t n_classes) {
    if (y.empty()) throw ValidationError("train_dummy: empty label sequence");
    detail::check_labels(y, n_classes, "train_dummy");
    DummyModel m;
    m.freq_.assign(n_classes, 0.0);
    for (auto c : y) m.freq_[c] += 1.0;
    for (auto& f : m.freq_) f /= static_cast<double>(y.size());
    m.label_ = argmax(m.freq_);
    return m;
}

void DummyModel::write(BinaryWriter& w) const {
    w.f64s(freq_);
    w.u64(label_);
}

DummyModel DummyModel::read(BinaryReader& r) {
    DummyModel m;
    m.freq_ = r.f64s();
    m.label_ = r.u64();
    if (m.label_ >= m.freq_.size()) throw ValidationError("dummy payload: label out of range");
    return m;
}

}  // namespace dialectid::classifiers
