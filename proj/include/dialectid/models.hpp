#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dialectid/corpus.hpp"
#include "dialectid/ensembles.hpp"
#include "dialectid/features.hpp"
#include "dialectid/model_io.hpp"

// Text-in, probabilities-out models addressable by kind name. This is the
// layer the CLI and the C API train, persist and run.
//
//   kind          features                          learner
//   dummy         -                                 most frequent label
//   mnb / bnb     word TF-IDF                       multinomial / Bernoulli NB
//   logreg / svm  word TF-IDF                       softmax / hinge linear model
//   knn           word TF-IDF                       cosine k-NN
//   charlm        characters                        per-class char n-gram LM
//   embed_logreg  mean-pooled word embeddings       logistic regression
//   embed_mlp     mean-pooled word embeddings       one-hidden-layer network
//   safina / mawdoo3 / just                         composite pipelines
namespace dialectid::models {

using Hyperparameters = std::map<std::string, std::string>;

class TextClassifier {
public:
    virtual ~TextClassifier() = default;

    virtual std::string kind() const = 0;
    const LabelRegistry& registry() const { return registry_; }
    const Hyperparameters& hyperparameters() const { return hp_; }

    /// Throws ValidationError if the corpus uses a different label registry.
    virtual ProbabilityMatrix predict_proba(const Corpus& corpus) const = 0;
    /// Argmax of predict_proba, except for voting pipelines.
    virtual ensembles::Predictions predict(const Corpus& corpus) const;

    ModelContainer to_container() const;

protected:
    virtual void write_payload(BinaryWriter& w) const = 0;
    void check_corpus(const Corpus& corpus) const;

    LabelRegistry registry_;
    Hyperparameters hp_;

    friend std::unique_ptr<TextClassifier> train_model(std::string_view, const Corpus&,
                                                       const Hyperparameters&);
    friend std::unique_ptr<TextClassifier> from_container(const ModelContainer&);
};

/// Hyperparameter names accepted by a model kind.
std::vector<std::string> hyperparameter_keys(std::string_view kind);
/// Whether the kind draws random numbers and therefore needs `seed`.
bool requires_seed(std::string_view kind);

/// Throws ValidationError for unknown kinds, unknown hyperparameter keys,
/// malformed values, or a missing seed for stochastic kinds.
std::unique_ptr<TextClassifier> train_model(std::string_view kind, const Corpus& train,
                                            const Hyperparameters& hp);

std::unique_ptr<TextClassifier> from_container(const ModelContainer& container);

}  // namespace dialectid::models
