#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dialectid/corpus.hpp"
#include "dialectid/features.hpp"
#include "dialectid/serialize.hpp"

// Base learners. Every model maps one example to a probability row over the
// label registry (length = number of classes, non-negative, sums to 1).
namespace dialectid::classifiers {

using features::SparseVector;
using DenseVector = std::vector<double>;

/// Numerically stable softmax; -inf scores get probability 0.
std::vector<double> softmax(std::span<const double> scores);

/// Lowest index among the maxima.
std::size_t argmax(std::span<const double> row);

// ---------------------------------------------------------------------------
// Naive Bayes

enum class NBKind { multinomial, bernoulli };

class NBModel {
public:
    NBKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    std::size_t n_classes() const { return log_prior_.size(); }
    std::size_t n_features() const { return n_features_; }
    const std::vector<double>& log_prior() const { return log_prior_; }
    /// Multinomial: log P(f|c). Bernoulli: log P(f present|c).
    double log_likelihood(std::size_t c, std::size_t f) const { return log_prob_[c * n_features_ + f]; }

    /// Unnormalized log P(c) + log P(x|c).
    std::vector<double> joint_log_likelihood(const SparseVector& x) const;
    std::vector<double> predict_proba(const SparseVector& x) const;

    void write(BinaryWriter& w) const;
    static NBModel read(BinaryReader& r);

private:
    friend NBModel train_nb(std::span<const SparseVector>, std::span<const LabelIndex>, std::size_t,
                            NBKind, double);

    NBKind kind_ = NBKind::multinomial;
    double alpha_ = 1.0;
    std::size_t n_features_ = 0;
    std::vector<double> log_prior_;
    std::vector<double> log_prob_;
    // Bernoulli only: log(1 - P(f present|c)) and its per-class sum.
    std::vector<double> log_absent_;
    std::vector<double> absent_total_;
};

/// Multinomial: log P(f|c) = log((count(f,c) + alpha) / (sum_f count(f,c) + alpha V)).
/// Bernoulli: P(f|c) = (docs of c with f + alpha) / (docs of c + 2 alpha).
/// Priors are the class frequencies.
NBModel train_nb(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                 std::size_t n_classes, NBKind kind, double alpha = 1.0);

/// One binary (class vs rest) NB model per class; the positive-class
/// probabilities are renormalized across classes.
class OneVsRestNB {
public:
    std::size_t n_classes() const { return binary_.size(); }
    std::vector<double> predict_proba(const SparseVector& x) const;

    void write(BinaryWriter& w) const;
    static OneVsRestNB read(BinaryReader& r);

private:
    friend OneVsRestNB train_nb_ovr(std::span<const SparseVector>, std::span<const LabelIndex>,
                                    std::size_t, NBKind, double);
    std::vector<NBModel> binary_;
};

OneVsRestNB train_nb_ovr(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                         std::size_t n_classes, NBKind kind, double alpha = 1.0);

// ---------------------------------------------------------------------------
// Linear models

enum class LinearLoss {
    softmax,  ///< multinomial logistic regression
    hinge     ///< one-vs-rest linear SVM
};

struct LinearConfig {
    double lambda = 0.0;
    double step = 0.1;
    std::size_t epochs = 20;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    LinearLoss loss = LinearLoss::softmax;
};

/// K x (D + 1) weights; column D is the bias.
class LinearModel {
public:
    LinearModel() = default;
    LinearModel(std::size_t n_classes, std::size_t n_features, LinearLoss loss);

    std::size_t n_classes() const { return n_classes_; }
    std::size_t n_features() const { return n_features_; }
    LinearLoss loss() const { return loss_; }
    std::span<const double> weights() const { return weights_; }
    std::span<double> weights() { return weights_; }
    double& weight(std::size_t c, std::size_t f) { return weights_[c * (n_features_ + 1) + f]; }
    double weight(std::size_t c, std::size_t f) const { return weights_[c * (n_features_ + 1) + f]; }
    double& bias(std::size_t c) { return weight(c, n_features_); }

    std::vector<double> scores(const SparseVector& x) const;
    /// Softmax of the scores, or a one-hot row at the best score for hinge models.
    std::vector<double> predict_proba(const SparseVector& x) const;

    void write(BinaryWriter& w) const;
    static LinearModel read(BinaryReader& r);

private:
    std::size_t n_classes_ = 0;
    std::size_t n_features_ = 0;
    LinearLoss loss_ = LinearLoss::softmax;
    std::vector<double> weights_;
};

/// Mean loss over (X, y) plus (lambda / 2) ||W||^2 with the bias excluded.
/// When `grad` is non-null it receives the gradient in the weights() layout.
double linear_objective(const LinearModel& model, std::span<const SparseVector> X,
                        std::span<const LabelIndex> y, double lambda, std::vector<double>* grad);

/// Mini-batch gradient descent from zero weights with seed-driven shuffling.
LinearModel train_linear(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                         std::size_t n_classes, const LinearConfig& cfg);

// ---------------------------------------------------------------------------
// Feed-forward network: input -> ReLU hidden -> dropout -> softmax

struct MLPConfig {
    std::size_t hidden = 64;
    double dropout = 0.0;
    double step = 0.01;
    double lambda = 0.0;
    std::size_t epochs = 30;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

class MLPModel {
public:
    MLPModel() = default;
    /// Glorot-uniform initialization drawn from `seed`.
    MLPModel(std::size_t n_inputs, std::size_t hidden, std::size_t n_classes, double dropout,
             std::uint64_t seed);

    std::size_t n_inputs() const { return n_inputs_; }
    std::size_t hidden() const { return hidden_; }
    std::size_t n_classes() const { return n_classes_; }
    double dropout() const { return dropout_; }

    /// All parameters in the order W1 (H x D), b1 (H), W2 (K x H), b2 (K).
    std::span<const double> parameters() const { return params_; }
    std::span<double> parameters() { return params_; }

    /// Evaluation-mode forward pass (no dropout).
    std::vector<double> predict_proba(std::span<const double> x) const;
    /// Forward pass with a per-hidden-unit multiplier (0 or 1/(1-p) for
    /// inverted dropout). An empty mask means evaluation mode.
    std::vector<double> forward(std::span<const double> x, std::span<const double> mask) const;

    void write(BinaryWriter& w) const;
    static MLPModel read(BinaryReader& r);

private:
    friend double mlp_objective(const MLPModel&, std::span<const DenseVector>,
                                std::span<const LabelIndex>, std::span<const std::vector<double>>,
                                double, std::vector<double>*);

    std::size_t n_inputs_ = 0;
    std::size_t hidden_ = 0;
    std::size_t n_classes_ = 0;
    double dropout_ = 0.0;
    std::vector<double> params_;
};

/// Mean cross-entropy (+ lambda/2 ||W||^2 on non-bias weights). `masks` holds
/// one dropout mask per example, or is empty for evaluation mode.
double mlp_objective(const MLPModel& model, std::span<const DenseVector> X,
                     std::span<const LabelIndex> y, std::span<const std::vector<double>> masks,
                     double lambda, std::vector<double>* grad);

MLPModel train_mlp(std::span<const DenseVector> X, std::span<const LabelIndex> y,
                   std::size_t n_classes, const MLPConfig& cfg);

// ---------------------------------------------------------------------------
// k-nearest neighbours (cosine similarity)

class KNNModel {
public:
    std::size_t k() const { return k_; }
    std::size_t n_classes() const { return n_classes_; }

    /// votes(c) / k over the k most similar training vectors; ties in
    /// similarity go to the lower training index. A zero query gives the
    /// uniform row.
    std::vector<double> predict_proba(const SparseVector& x) const;

    void write(BinaryWriter& w) const;
    static KNNModel read(BinaryReader& r);

private:
    friend KNNModel train_knn(std::span<const SparseVector>, std::span<const LabelIndex>,
                              std::size_t, std::size_t);
    std::size_t k_ = 1;
    std::size_t n_classes_ = 0;
    std::vector<SparseVector> points_;
    std::vector<double> norms_;
    std::vector<LabelIndex> labels_;
};

KNNModel train_knn(std::span<const SparseVector> X, std::span<const LabelIndex> y,
                   std::size_t n_classes, std::size_t k);

// ---------------------------------------------------------------------------
// Most-frequent baseline

class DummyModel {
public:
    LabelIndex label() const { return label_; }
    const std::vector<double>& frequencies() const { return freq_; }
    std::vector<double> predict_proba() const { return freq_; }

    void write(BinaryWriter& w) const;
    static DummyModel read(BinaryReader& r);

private:
    friend DummyModel train_dummy(std::span<const LabelIndex>, std::size_t);
    std::vector<double> freq_;
    LabelIndex label_ = 0;
};

DummyModel train_dummy(std::span<const LabelIndex> y, std::size_t n_classes);

// ---------------------------------------------------------------------------
// Per-class character n-gram language models

struct CharLMConfig {
    std::size_t order = 5;
    /// Word-duplicate the text before modelling (training and scoring).
    bool duplicate_words = false;
    /// Begin/end-of-text symbols around every text.
    bool boundary_symbols = true;
};

/// Interpolated Witten-Bell smoothing over orders 1..n. The order-1 (empty
/// context) distribution is add-one over the shared alphabet:
///   P(w) = (c(w) + 1) / (N + |A|)
/// and every longer context h interpolates with its suffix h':
///   P(w|h) = (c(h,w) + T(h) P(w|h')) / (c(h) + T(h))
/// where T(h) is the number of distinct symbols seen after h. Contexts never
/// seen in training defer to h'.
class ClassConditionalLM {
public:
    static constexpr char32_t kBos = 0x110000;
    static constexpr char32_t kEos = 0x110001;
    static constexpr char32_t kUnk = 0x110002;

    const CharLMConfig& config() const { return cfg_; }
    std::size_t n_classes() const { return classes_.size(); }
    /// Sorted; always includes kUnk, and kEos when boundary symbols are on.
    const std::vector<char32_t>& alphabet() const { return alphabet_; }

    /// The symbol sequence a text is scored as (after preprocessing, UNK
    /// mapping and boundary padding). Position 0 is kBos when padding is on.
    std::u32string symbols(std::string_view text) const;

    /// P(symbol | context) for class c. Only the last order-1 context symbols
    /// are used.
    double prob(LabelIndex c, std::u32string_view context, char32_t symbol) const;
    /// Sum of log P over every predicted symbol of the text.
    double log_prob(LabelIndex c, std::string_view text) const;
    /// Number of predicted symbols (the per-character normalizer).
    std::size_t predicted_count(std::string_view text) const;

    /// Every context observed in class c's training data, including the empty
    /// one, oldest symbol first.
    std::vector<std::u32string> observed_contexts(LabelIndex c) const;

    /// Softmax over classes of log_prob / predicted_count. Empty text gives
    /// the uniform row.
    std::vector<double> predict_proba(std::string_view text) const;

    void write(BinaryWriter& w) const;
    static ClassConditionalLM read(BinaryReader& r);

private:
    friend ClassConditionalLM train_charlm(std::span<const std::string>, std::span<const LabelIndex>,
                                           std::size_t, const CharLMConfig&);

    // Trie over reversed contexts: the child of a node for context h along
    // symbol s is the context s+h.
    struct Node {
        std::uint64_t total = 0;
        std::map<char32_t, std::uint64_t> next;
        std::map<char32_t, std::uint32_t> children;
    };
    struct ClassTable {
        std::vector<Node> nodes{Node{}};
    };

    double prob_in(const ClassTable& t, std::u32string_view context, char32_t symbol) const;

    CharLMConfig cfg_;
    std::vector<char32_t> alphabet_;
    std::vector<ClassTable> classes_;
};

/// Throws ValidationError when some class has no training text.
ClassConditionalLM train_charlm(std::span<const std::string> texts, std::span<const LabelIndex> y,
                                std::size_t n_classes, const CharLMConfig& cfg);

}  // namespace dialectid::classifiers
