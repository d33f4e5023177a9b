#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dialectid/classifiers.hpp"
#include "dialectid/corpus.hpp"
#include "dialectid/ensembles.hpp"
#include "dialectid/features.hpp"

// The composite dialect-identification systems built from the base learners.
namespace dialectid::ensembles {

// ---------------------------------------------------------------------------
// Safina: char LM + char n-gram NB + word NB, soft-voted.

struct SafinaConfig {
    std::size_t lm_order = 5;
    double alpha = 1.0;
    std::size_t char_lo = 4;
    std::size_t char_hi = 6;
    std::size_t char_min_df = 2;
    std::size_t word_min_df = 1;
};

class SafinaPipeline {
public:
    static SafinaPipeline train(const Corpus& train, const SafinaConfig& cfg);

    const LabelRegistry& registry() const { return registry_; }
    /// Per-component matrices: char LM, char n-gram NB, word NB.
    std::vector<ProbabilityMatrix> component_proba(const Corpus& corpus) const;
    ProbabilityMatrix predict_proba(const Corpus& corpus) const;

    void write(BinaryWriter& w) const;
    static SafinaPipeline read(BinaryReader& r, const LabelRegistry& registry);

private:
    LabelRegistry registry_;
    classifiers::ClassConditionalLM lm_;
    features::TextVectorizer char_vec_;
    classifiers::NBModel char_nb_;
    features::TextVectorizer word_vec_;
    classifiers::NBModel word_nb_;
};

Predictions run_safina_pipeline(const Corpus& train, const Corpus& eval, const SafinaConfig& cfg = {});

// ---------------------------------------------------------------------------
// Mawdoo3: stacked probabilities + TF-IDF feeding five hard-voted learners.

enum class StageTwoVoter { mnb_ovr, svm, bnb, knn_ovr, dummy };

std::string to_string(StageTwoVoter v);
StageTwoVoter parse_stage_two_voter(std::string_view name);

struct Mawdoo3Config {
    std::uint64_t seed = 0;
    std::size_t folds = 5;
    std::size_t min_df = 1;
    double alpha = 1.0;
    classifiers::LinearConfig logreg{.lambda = 1e-4, .step = 0.1, .epochs = 30};
    classifiers::LinearConfig svm{.lambda = 1e-4, .step = 0.1, .epochs = 30,
                                  .loss = classifiers::LinearLoss::hinge};
    std::size_t knn_k = 5;
    std::vector<StageTwoVoter> voters{StageTwoVoter::mnb_ovr, StageTwoVoter::svm,
                                      StageTwoVoter::bnb, StageTwoVoter::knn_ovr,
                                      StageTwoVoter::dummy};
};

class Mawdoo3Pipeline {
public:
    static Mawdoo3Pipeline train(const Corpus& train, const Mawdoo3Config& cfg);

    const LabelRegistry& registry() const { return registry_; }
    std::size_t tfidf_width() const { return vectorizer_.dimension(); }
    /// Width of the stage-two feature space: 3 K + |TF-IDF vocabulary|.
    std::size_t stacked_width() const { return 3 * registry_.size() + tfidf_width(); }

    /// Stage-one probability matrices (MNB, logistic regression, dummy).
    std::vector<ProbabilityMatrix> stage_one_proba(const Corpus& corpus) const;
    std::vector<features::SparseVector> stacked_features(const Corpus& corpus) const;
    /// One predicted-label sequence per stage-two voter.
    std::vector<std::vector<LabelIndex>> voter_labels(const Corpus& corpus) const;
    /// Hard vote; probabilities are the vote shares.
    Predictions predict(const Corpus& corpus) const;

    void write(BinaryWriter& w) const;
    static Mawdoo3Pipeline read(BinaryReader& r, const LabelRegistry& registry);

private:
    struct Voter {
        StageTwoVoter kind;
        classifiers::OneVsRestNB ovr;
        classifiers::NBModel nb;
        classifiers::LinearModel linear;
        classifiers::KNNModel knn;
        classifiers::DummyModel dummy;
    };

    LabelRegistry registry_;
    features::TextVectorizer vectorizer_;
    classifiers::NBModel mnb_;
    classifiers::LinearModel logreg_;
    classifiers::DummyModel dummy_;
    std::vector<Voter> voters_;
};

Predictions run_mawdoo3_pipeline(const Corpus& train, const Corpus& eval, const Mawdoo3Config& cfg = {});

// ---------------------------------------------------------------------------
// JUST: shuffle-balanced data, LM probability row + word and char TF-IDF,
// one-vs-rest MNB.

struct JustConfig {
    std::uint64_t seed = 0;
    bool augment = true;
    std::size_t lm_order = 5;
    double alpha = 1.0;
    std::size_t word_min_df = 1;
    std::size_t char_lo = 2;
    std::size_t char_hi = 5;
    std::size_t char_min_df = 2;
};

class JustPipeline {
public:
    static JustPipeline train(const Corpus& train, const JustConfig& cfg);

    const LabelRegistry& registry() const { return registry_; }
    /// K + |word vocabulary| + |char vocabulary|.
    std::size_t feature_width() const;
    std::vector<features::SparseVector> features(const Corpus& corpus) const;
    ProbabilityMatrix predict_proba(const Corpus& corpus) const;

    void write(BinaryWriter& w) const;
    static JustPipeline read(BinaryReader& r, const LabelRegistry& registry);

private:
    LabelRegistry registry_;
    classifiers::ClassConditionalLM lm_;
    features::TextVectorizer word_vec_;
    features::TextVectorizer char_vec_;
    classifiers::OneVsRestNB nb_;
};

Predictions run_just_pipeline(const Corpus& train, const Corpus& eval, const JustConfig& cfg = {});

}  // namespace dialectid::ensembles
