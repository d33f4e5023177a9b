#include "dialectid/models.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "dialectid/classifiers.hpp"
#include "dialectid/error.hpp"
#include "dialectid/pipelines.hpp"
#include "dialectid/text.hpp"
#include "io_util.hpp"

namespace dialectid::models {
namespace {

using classifiers::NBKind;
using features::Analyzer;
using features::TextVectorizer;
using features::Weighting;

const std::map<std::string, std::vector<std::string>, std::less<>>& key_table() {
    static const std::map<std::string, std::vector<std::string>, std::less<>> table{
        {"dummy", {}},
        {"mnb", {"alpha", "min_df"}},
        {"bnb", {"alpha", "min_df"}},
        {"logreg", {"batch_size", "epochs", "lambda", "min_df", "seed", "step"}},
        {"svm", {"batch_size", "epochs", "lambda", "min_df", "seed", "step"}},
        {"knn", {"k", "min_df"}},
        {"charlm", {"duplicate_words", "order"}},
        {"embed_logreg", {"batch_size", "embeddings", "epochs", "lambda", "seed", "step"}},
        {"embed_mlp",
         {"batch_size", "dropout", "embeddings", "epochs", "hidden", "lambda", "seed", "step"}},
        {"safina", {"alpha", "char_hi", "char_lo", "char_min_df", "order", "word_min_df"}},
        {"mawdoo3",
         {"alpha", "folds", "knn_k", "lr_epochs", "lr_lambda", "lr_step", "min_df", "seed",
          "svm_epochs", "svm_lambda", "svm_step", "voters"}},
        {"just",
         {"alpha", "augment", "char_hi", "char_lo", "char_min_df", "order", "seed", "word_min_df"}},
    };
    return table;
}

// Typed access to a hyperparameter map.
class Params {
public:
    explicit Params(const Hyperparameters& hp) : hp_(hp) {}

    double real(const std::string& key, double fallback) const {
        auto it = hp_.find(key);
        if (it == hp_.end()) return fallback;
        try {
            return parse_double(it->second);
        } catch (const ValidationError&) {
            throw ValidationError("hyperparameter " + key + ": not a number: '" + it->second + "'");
        }
    }
    std::uint64_t integer(const std::string& key, std::uint64_t fallback) const {
        auto it = hp_.find(key);
        if (it == hp_.end()) return fallback;
        return parse_integer(key, it->second);
    }
    std::uint64_t required_integer(const std::string& key) const {
        auto it = hp_.find(key);
        if (it == hp_.end()) throw ValidationError("hyperparameter " + key + " is required");
        return parse_integer(key, it->second);
    }
    bool flag(const std::string& key, bool fallback) const {
        auto it = hp_.find(key);
        if (it == hp_.end()) return fallback;
        const auto& v = it->second;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ValidationError("hyperparameter " + key + ": expected true/false, got '" + v + "'");
    }
    std::string text(const std::string& key) const {
        auto it = hp_.find(key);
        if (it == hp_.end() || it->second.empty())
            throw ValidationError("hyperparameter " + key + " is required");
        return it->second;
    }
    std::optional<std::string> optional_text(const std::string& key) const {
        auto it = hp_.find(key);
        if (it == hp_.end()) return std::nullopt;
        return it->second;
    }

private:
    static std::uint64_t parse_integer(const std::string& key, const std::string& v) {
        std::uint64_t out = 0;
        auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
            throw ValidationError("hyperparameter " + key + ": expected a non-negative integer, got '" +
                                  v + "'");
        return out;
    }

    const Hyperparameters& hp_;
};

classifiers::LinearConfig linear_config(const Params& p, classifiers::LinearLoss loss) {
    classifiers::LinearConfig cfg;
    cfg.lambda = p.real("lambda", 1e-4);
    cfg.step = p.real("step", 0.1);
    cfg.epochs = p.integer("epochs", 20);
    cfg.batch_size = p.integer("batch_size", 32);
    cfg.seed = p.required_integer("seed");
    cfg.loss = loss;
    return cfg;
}

std::vector<classifiers::DenseVector> pooled(const Corpus& corpus, const features::EmbeddingTable& table) {
    std::vector<classifiers::DenseVector> out;
    out.reserve(corpus.size());
    for (const auto& e : corpus.examples) out.push_back(features::pool_embedding(text::tokenize(e.text), table));
    return out;
}

template <class RowFn>
ProbabilityMatrix rows_to_matrix(const Corpus& corpus, RowFn&& row_of) {
    std::vector<double> values;
    values.reserve(corpus.size() * corpus.registry.size());
    for (const auto& e : corpus.examples) {
        const auto row = row_of(e);
        values.insert(values.end(), row.begin(), row.end());
    }
    return ProbabilityMatrix(corpus.ids(), corpus.registry, std::move(values));
}

// ---------------------------------------------------------------------------

class DummyClassifier final : public TextClassifier {
public:
    classifiers::DummyModel model;

    std::string kind() const override { return "dummy"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return rows_to_matrix(c, [&](const LabeledExample&) { return model.predict_proba(); });
    }
    void write_payload(BinaryWriter& w) const override { model.write(w); }
};

class NBClassifier final : public TextClassifier {
public:
    NBKind nb_kind = NBKind::multinomial;
    TextVectorizer vectorizer;
    classifiers::NBModel model;

    std::string kind() const override { return nb_kind == NBKind::multinomial ? "mnb" : "bnb"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return rows_to_matrix(c, [&](const LabeledExample& e) {
            return model.predict_proba(vectorizer.transform(e.text));
        });
    }
    void write_payload(BinaryWriter& w) const override {
        vectorizer.write(w);
        model.write(w);
    }
};

class LinearClassifier final : public TextClassifier {
public:
    TextVectorizer vectorizer;
    classifiers::LinearModel model;

    std::string kind() const override {
        return model.loss() == classifiers::LinearLoss::softmax ? "logreg" : "svm";
    }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return rows_to_matrix(c, [&](const LabeledExample& e) {
            return model.predict_proba(vectorizer.transform(e.text));
        });
    }
    void write_payload(BinaryWriter& w) const override {
        vectorizer.write(w);
        model.write(w);
    }
};

class KNNClassifier final : public TextClassifier {
public:
    TextVectorizer vectorizer;
    classifiers::KNNModel model;

    std::string kind() const override { return "knn"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return rows_to_matrix(c, [&](const LabeledExample& e) {
            return model.predict_proba(vectorizer.transform(e.text));
        });
    }
    void write_payload(BinaryWriter& w) const override {
        vectorizer.write(w);
        model.write(w);
    }
};

class CharLMClassifier final : public TextClassifier {
public:
    classifiers::ClassConditionalLM model;

    std::string kind() const override { return "charlm"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return rows_to_matrix(c, [&](const LabeledExample& e) { return model.predict_proba(e.text); });
    }
    void write_payload(BinaryWriter& w) const override { model.write(w); }
};

class EmbeddingLinearClassifier final : public TextClassifier {
public:
    features::EmbeddingTable table;
    classifiers::LinearModel model;

    std::string kind() const override { return "embed_logreg"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return rows_to_matrix(c, [&](const LabeledExample& e) {
            const auto x = features::pool_embedding(text::tokenize(e.text), table);
            return model.predict_proba(features::SparseVector::from_dense(x));
        });
    }
    void write_payload(BinaryWriter& w) const override {
        table.write(w);
        model.write(w);
    }
};

class EmbeddingMLPClassifier final : public TextClassifier {
public:
    features::EmbeddingTable table;
    classifiers::MLPModel model;

    std::string kind() const override { return "embed_mlp"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return rows_to_matrix(c, [&](const LabeledExample& e) {
            return model.predict_proba(features::pool_embedding(text::tokenize(e.text), table));
        });
    }
    void write_payload(BinaryWriter& w) const override {
        table.write(w);
        model.write(w);
    }
};

class SafinaClassifier final : public TextClassifier {
public:
    ensembles::SafinaPipeline pipeline;

    std::string kind() const override { return "safina"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return pipeline.predict_proba(c);
    }
    void write_payload(BinaryWriter& w) const override { pipeline.write(w); }
};

class Mawdoo3Classifier final : public TextClassifier {
public:
    ensembles::Mawdoo3Pipeline pipeline;

    std::string kind() const override { return "mawdoo3"; }
    // The vote-share matrix; its argmax is the hard-vote decision.
    ProbabilityMatrix predict_proba(const Corpus& c) const override { return *predict(c).probabilities; }
    ensembles::Predictions predict(const Corpus& c) const override {
        check_corpus(c);
        return pipeline.predict(c);
    }
    void write_payload(BinaryWriter& w) const override { pipeline.write(w); }
};

class JustClassifier final : public TextClassifier {
public:
    ensembles::JustPipeline pipeline;

    std::string kind() const override { return "just"; }
    ProbabilityMatrix predict_proba(const Corpus& c) const override {
        check_corpus(c);
        return pipeline.predict_proba(c);
    }
    void write_payload(BinaryWriter& w) const override { pipeline.write(w); }
};

}  // namespace

ensembles::Predictions TextClassifier::predict(const Corpus& corpus) const {
    return ensembles::argmax_labels(predict_proba(corpus));
}

void TextClassifier::check_corpus(const Corpus& corpus) const {
    if (corpus.registry != registry_)
        throw ValidationError("label registry mismatch: the corpus labels differ from the " + kind() +
                              " model's");
}

ModelContainer TextClassifier::to_container() const {
    BinaryWriter w;
    w.strs(registry_.labels());
    write_payload(w);
    ModelContainer c;
    c.model_kind = kind();
    c.hyperparameters = hp_;
    c.payload = w.take();
    return c;
}

std::vector<std::string> hyperparameter_keys(std::string_view kind) {
    auto it = key_table().find(kind);
    if (it == key_table().end()) throw ValidationError("unknown model kind " + std::string(kind));
    return it->second;
}

bool requires_seed(std::string_view kind) {
    const auto keys = hyperparameter_keys(kind);
    return std::find(keys.begin(), keys.end(), "seed") != keys.end();
}

std::unique_ptr<TextClassifier> train_model(std::string_view kind, const Corpus& train,
                                            const Hyperparameters& hp) {
    const auto keys = hyperparameter_keys(kind);
    for (const auto& [k, v] : hp)
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw ValidationError("unknown hyperparameter '" + k + "' for model kind " +
                                  std::string(kind));
    if (train.examples.empty()) throw ValidationError("training corpus is empty");
    const Params p(hp);
    if (requires_seed(kind)) p.required_integer("seed");

    const auto texts = train.texts();
    const auto y = train.label_indices();
    const std::size_t K = train.registry.size();

    std::unique_ptr<TextClassifier> model;
    if (kind == "dummy") {
        auto m = std::make_unique<DummyClassifier>();
        m->model = classifiers::train_dummy(y, K);
        model = std::move(m);
    } else if (kind == "mnb" || kind == "bnb") {
        auto m = std::make_unique<NBClassifier>();
        m->nb_kind = kind == "mnb" ? NBKind::multinomial : NBKind::bernoulli;
        m->vectorizer = TextVectorizer::fit(texts, Analyzer::words(), p.integer("min_df", 1), Weighting::tfidf);
        m->model = classifiers::train_nb(m->vectorizer.transform(texts), y, K, m->nb_kind,
                                         p.real("alpha", 1.0));
        model = std::move(m);
    } else if (kind == "logreg" || kind == "svm") {
        auto m = std::make_unique<LinearClassifier>();
        m->vectorizer = TextVectorizer::fit(texts, Analyzer::words(), p.integer("min_df", 1), Weighting::tfidf);
        m->model = classifiers::train_linear(
            m->vectorizer.transform(texts), y, K,
            linear_config(p, kind == "logreg" ? classifiers::LinearLoss::softmax
                                              : classifiers::LinearLoss::hinge));
        model = std::move(m);
    } else if (kind == "knn") {
        auto m = std::make_unique<KNNClassifier>();
        m->vectorizer = TextVectorizer::fit(texts, Analyzer::words(), p.integer("min_df", 1), Weighting::tfidf);
        m->model = classifiers::train_knn(m->vectorizer.transform(texts), y, K, p.integer("k", 5));
        model = std::move(m);
    } else if (kind == "charlm") {
        auto m = std::make_unique<CharLMClassifier>();
        m->model = classifiers::train_charlm(
            texts, y, K, {p.integer("order", 5), p.flag("duplicate_words", true), true});
        model = std::move(m);
    } else if (kind == "embed_logreg") {
        auto m = std::make_unique<EmbeddingLinearClassifier>();
        m->table = features::load_embeddings(p.text("embeddings"));
        std::vector<features::SparseVector> X;
        for (const auto& x : pooled(train, m->table)) X.push_back(features::SparseVector::from_dense(x));
        m->model = classifiers::train_linear(X, y, K, linear_config(p, classifiers::LinearLoss::softmax));
        model = std::move(m);
    } else if (kind == "embed_mlp") {
        auto m = std::make_unique<EmbeddingMLPClassifier>();
        m->table = features::load_embeddings(p.text("embeddings"));
        classifiers::MLPConfig cfg;
        cfg.hidden = p.integer("hidden", 64);
        cfg.dropout = p.real("dropout", 0.0);
        cfg.step = p.real("step", 0.01);
        cfg.lambda = p.real("lambda", 0.0);
        cfg.epochs = p.integer("epochs", 30);
        cfg.batch_size = p.integer("batch_size", 32);
        cfg.seed = p.required_integer("seed");
        m->model = classifiers::train_mlp(pooled(train, m->table), y, K, cfg);
        model = std::move(m);
    } else if (kind == "safina") {
        auto m = std::make_unique<SafinaClassifier>();
        ensembles::SafinaConfig cfg;
        cfg.lm_order = p.integer("order", cfg.lm_order);
        cfg.alpha = p.real("alpha", cfg.alpha);
        cfg.char_lo = p.integer("char_lo", cfg.char_lo);
        cfg.char_hi = p.integer("char_hi", cfg.char_hi);
        cfg.char_min_df = p.integer("char_min_df", cfg.char_min_df);
        cfg.word_min_df = p.integer("word_min_df", cfg.word_min_df);
        m->pipeline = ensembles::SafinaPipeline::train(train, cfg);
        model = std::move(m);
    } else if (kind == "mawdoo3") {
        auto m = std::make_unique<Mawdoo3Classifier>();
        ensembles::Mawdoo3Config cfg;
        cfg.seed = p.required_integer("seed");
        cfg.folds = p.integer("folds", cfg.folds);
        cfg.min_df = p.integer("min_df", cfg.min_df);
        cfg.alpha = p.real("alpha", cfg.alpha);
        cfg.logreg.lambda = p.real("lr_lambda", cfg.logreg.lambda);
        cfg.logreg.step = p.real("lr_step", cfg.logreg.step);
        cfg.logreg.epochs = p.integer("lr_epochs", cfg.logreg.epochs);
        cfg.svm.lambda = p.real("svm_lambda", cfg.svm.lambda);
        cfg.svm.step = p.real("svm_step", cfg.svm.step);
        cfg.svm.epochs = p.integer("svm_epochs", cfg.svm.epochs);
        cfg.knn_k = p.integer("knn_k", cfg.knn_k);
        if (auto voters = p.optional_text("voters")) {
            cfg.voters.clear();
            for (const auto& name : detail::split(*voters, ','))
                cfg.voters.push_back(ensembles::parse_stage_two_voter(detail::trim(name)));
        }
        m->pipeline = ensembles::Mawdoo3Pipeline::train(train, cfg);
        model = std::move(m);
    } else if (kind == "just") {
        auto m = std::make_unique<JustClassifier>();
        ensembles::JustConfig cfg;
        cfg.seed = p.required_integer("seed");
        cfg.augment = p.flag("augment", cfg.augment);
        cfg.lm_order = p.integer("order", cfg.lm_order);
        cfg.alpha = p.real("alpha", cfg.alpha);
        cfg.word_min_df = p.integer("word_min_df", cfg.word_min_df);
        cfg.char_lo = p.integer("char_lo", cfg.char_lo);
        cfg.char_hi = p.integer("char_hi", cfg.char_hi);
        cfg.char_min_df = p.integer("char_min_df", cfg.char_min_df);
        m->pipeline = ensembles::JustPipeline::train(train, cfg);
        model = std::move(m);
    } else {
        throw ValidationError("unknown model kind " + std::string(kind));
    }
    model->registry_ = train.registry;
    model->hp_ = hp;
    return model;
}

std::unique_ptr<TextClassifier> from_container(const ModelContainer& container) {
    if (container.format_version != ModelContainer::kFormatVersion)
        throw ValidationError("unsupported model format_version " +
                              std::to_string(container.format_version));
    BinaryReader r(container.payload);
    const LabelRegistry registry(r.strs());
    const auto& kind = container.model_kind;

    std::unique_ptr<TextClassifier> model;
    if (kind == "dummy") {
        auto m = std::make_unique<DummyClassifier>();
        m->model = classifiers::DummyModel::read(r);
        model = std::move(m);
    } else if (kind == "mnb" || kind == "bnb") {
        auto m = std::make_unique<NBClassifier>();
        m->vectorizer = TextVectorizer::read(r);
        m->model = classifiers::NBModel::read(r);
        m->nb_kind = m->model.kind();
        model = std::move(m);
    } else if (kind == "logreg" || kind == "svm") {
        auto m = std::make_unique<LinearClassifier>();
        m->vectorizer = TextVectorizer::read(r);
        m->model = classifiers::LinearModel::read(r);
        model = std::move(m);
    } else if (kind == "knn") {
        auto m = std::make_unique<KNNClassifier>();
        m->vectorizer = TextVectorizer::read(r);
        m->model = classifiers::KNNModel::read(r);
        model = std::move(m);
    } else if (kind == "charlm") {
        auto m = std::make_unique<CharLMClassifier>();
        m->model = classifiers::ClassConditionalLM::read(r);
        model = std::move(m);
    } else if (kind == "embed_logreg") {
        auto m = std::make_unique<EmbeddingLinearClassifier>();
        m->table = features::EmbeddingTable::read(r);
        m->model = classifiers::LinearModel::read(r);
        model = std::move(m);
    } else if (kind == "embed_mlp") {
        auto m = std::make_unique<EmbeddingMLPClassifier>();
        m->table = features::EmbeddingTable::read(r);
        m->model = classifiers::MLPModel::read(r);
        model = std::move(m);
    } else if (kind == "safina") {
        auto m = std::make_unique<SafinaClassifier>();
        m->pipeline = ensembles::SafinaPipeline::read(r, registry);
        model = std::move(m);
    } else if (kind == "mawdoo3") {
        auto m = std::make_unique<Mawdoo3Classifier>();
        m->pipeline = ensembles::Mawdoo3Pipeline::read(r, registry);
        model = std::move(m);
    } else if (kind == "just") {
        auto m = std::make_unique<JustClassifier>();
        m->pipeline = ensembles::JustPipeline::read(r, registry);
        model = std::move(m);
    } else {
        throw ValidationError("unknown model kind " + kind);
    }
    r.expect_end();
    if (model->kind() != kind)
        throw ValidationError("model payload is a " + model->kind() + " model, header says " + kind);
    model->registry_ = registry;
    model->hp_ = container.hyperparameters;
    return model;
}

}  // namespace dialectid::models
