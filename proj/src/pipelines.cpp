#include "dialectid/pipelines.hpp"

#include <numeric>
#include <random>

#include "dialectid/augmentation.hpp"
#include "dialectid/error.hpp"

namespace dialectid::ensembles {
namespace {

using classifiers::NBKind;
using features::Analyzer;
using features::SparseVector;
using features::TextVectorizer;
using features::Weighting;

// Runs one pipeline stage, prefixing any error with the stage name.
template <class F>
auto stage(std::string_view name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const IoError& e) {
        throw IoError(std::string(name) + ": " + e.what());
    } catch (const Error& e) {
        throw ValidationError(std::string(name) + ": " + e.what());
    }
}

template <class RowFn>
ProbabilityMatrix build_matrix(const std::vector<std::string>& ids, const LabelRegistry& registry,
                               RowFn&& row_of) {
    std::vector<double> values;
    values.reserve(ids.size() * registry.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto row = row_of(i);
        values.insert(values.end(), row.begin(), row.end());
    }
    return ProbabilityMatrix(ids, registry, std::move(values));
}

void check_registry(const Corpus& corpus, const LabelRegistry& registry) {
    if (corpus.registry != registry)
        throw ValidationError("corpus label registry differs from the model's");
}

}  // namespace

// ---------------------------------------------------------------------------
// Safina

SafinaPipeline SafinaPipeline::train(const Corpus& train, const SafinaConfig& cfg) {
    SafinaPipeline p;
    p.registry_ = train.registry;
    const auto texts = train.texts();
    const auto y = stage("safina", [&] { return train.label_indices(); });
    const std::size_t K = train.registry.size();

    p.lm_ = stage("safina char LM", [&] {
        return classifiers::train_charlm(texts, y, K, {cfg.lm_order, true, true});
    });
    stage("safina char NB", [&] {
        p.char_vec_ = TextVectorizer::fit(texts, Analyzer::chars(cfg.char_lo, cfg.char_hi, true),
                                          cfg.char_min_df, Weighting::counts);
        p.char_nb_ = classifiers::train_nb(p.char_vec_.transform(texts), y, K, NBKind::multinomial,
                                           cfg.alpha);
    });
    stage("safina word NB", [&] {
        p.word_vec_ = TextVectorizer::fit(texts, Analyzer::words(1, 1), cfg.word_min_df,
                                          Weighting::counts);
        p.word_nb_ = classifiers::train_nb(p.word_vec_.transform(texts), y, K, NBKind::multinomial,
                                           cfg.alpha);
    });
    return p;
}

std::vector<ProbabilityMatrix> SafinaPipeline::component_proba(const Corpus& corpus) const {
    check_registry(corpus, registry_);
    const auto ids = corpus.ids();
    const auto& ex = corpus.examples;
    std::vector<ProbabilityMatrix> out;
    out.push_back(build_matrix(ids, registry_, [&](std::size_t i) { return lm_.predict_proba(ex[i].text); }));
    out.push_back(build_matrix(ids, registry_, [&](std::size_t i) {
        return char_nb_.predict_proba(char_vec_.transform(ex[i].text));
    }));
    out.push_back(build_matrix(ids, registry_, [&](std::size_t i) {
        return word_nb_.predict_proba(word_vec_.transform(ex[i].text));
    }));
    return out;
}

ProbabilityMatrix SafinaPipeline::predict_proba(const Corpus& corpus) const {
    return soft_vote(component_proba(corpus));
}

void SafinaPipeline::write(BinaryWriter& w) const {
    lm_.write(w);
    char_vec_.write(w);
    char_nb_.write(w);
    word_vec_.write(w);
    word_nb_.write(w);
}

SafinaPipeline SafinaPipeline::read(BinaryReader& r, const LabelRegistry& registry) {
    SafinaPipeline p;
    p.registry_ = registry;
    p.lm_ = classifiers::ClassConditionalLM::read(r);
    p.char_vec_ = TextVectorizer::read(r);
    p.char_nb_ = classifiers::NBModel::read(r);
    p.word_vec_ = TextVectorizer::read(r);
    p.word_nb_ = classifiers::NBModel::read(r);
    return p;
}

Predictions run_safina_pipeline(const Corpus& train, const Corpus& eval, const SafinaConfig& cfg) {
    const auto model = SafinaPipeline::train(train, cfg);
    return argmax_labels(stage("safina predict", [&] { return model.predict_proba(eval); }));
}

// ---------------------------------------------------------------------------
// Mawdoo3

std::string to_string(StageTwoVoter v) {
    switch (v) {
        case StageTwoVoter::mnb_ovr: return "mnb_ovr";
        case StageTwoVoter::svm: return "svm";
        case StageTwoVoter::bnb: return "bnb";
        case StageTwoVoter::knn_ovr: return "knn_ovr";
        case StageTwoVoter::dummy: return "dummy";
    }
    return "?";
}

StageTwoVoter parse_stage_two_voter(std::string_view name) {
    for (auto v : {StageTwoVoter::mnb_ovr, StageTwoVoter::svm, StageTwoVoter::bnb,
                   StageTwoVoter::knn_ovr, StageTwoVoter::dummy})
        if (to_string(v) == name) return v;
    throw ValidationError("unknown stage-two voter " + std::string(name));
}

Mawdoo3Pipeline Mawdoo3Pipeline::train(const Corpus& train, const Mawdoo3Config& cfg) {
    if (cfg.voters.empty()) throw ValidationError("mawdoo3: no stage-two voters");
    Mawdoo3Pipeline p;
    p.registry_ = train.registry;
    const std::size_t K = train.registry.size();
    const auto ids = train.ids();
    const auto texts = train.texts();
    const auto y = stage("mawdoo3", [&] { return train.label_indices(); });
    const std::size_t n = y.size();

    std::vector<SparseVector> X;
    std::vector<ProbabilityMatrix> oof;
    stage("mawdoo3 stage 1", [&] {
        const std::size_t folds = std::min(cfg.folds, n);
        if (folds < 2) throw ValidationError("out-of-fold stacking needs at least 2 folds and 2 examples");

        p.vectorizer_ = TextVectorizer::fit(texts, Analyzer::words(1, 1), cfg.min_df, Weighting::tfidf);
        X = p.vectorizer_.transform(texts);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(cfg.seed);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<std::size_t> fold_of(n);
        for (std::size_t j = 0; j < n; ++j) fold_of[perm[j]] = j % folds;

        std::vector<std::vector<double>> rows(3, std::vector<double>(n * K));
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<SparseVector> Xf;
            std::vector<LabelIndex> yf;
            for (std::size_t i = 0; i < n; ++i) {
                if (fold_of[i] == f) continue;
                Xf.push_back(X[i]);
                yf.push_back(y[i]);
            }
            auto lr_cfg = cfg.logreg;
            lr_cfg.seed = cfg.seed + f + 1;
            const auto mnb = classifiers::train_nb(Xf, yf, K, NBKind::multinomial, cfg.alpha);
            const auto lr = classifiers::train_linear(Xf, yf, K, lr_cfg);
            const auto dummy = classifiers::train_dummy(yf, K);
            for (std::size_t i = 0; i < n; ++i) {
                if (fold_of[i] != f) continue;
                const std::vector<double> r[3] = {mnb.predict_proba(X[i]), lr.predict_proba(X[i]),
                                                  dummy.predict_proba()};
                for (std::size_t m = 0; m < 3; ++m)
                    std::copy(r[m].begin(), r[m].end(), rows[m].begin() + static_cast<std::ptrdiff_t>(i * K));
            }
        }
        for (auto& r : rows) oof.emplace_back(ids, train.registry, std::move(r));

        auto lr_cfg = cfg.logreg;
        lr_cfg.seed = cfg.seed;
        p.mnb_ = classifiers::train_nb(X, y, K, NBKind::multinomial, cfg.alpha);
        p.logreg_ = classifiers::train_linear(X, y, K, lr_cfg);
        p.dummy_ = classifiers::train_dummy(y, K);
    });

    const auto stacked = stage("mawdoo3 stacking", [&] {
        return features::stack_probability_features(oof, ids, X);
    });

    stage("mawdoo3 stage 2", [&] {
        for (auto kind : cfg.voters) {
            Voter v{kind, {}, {}, {}, {}, {}};
            switch (kind) {
                case StageTwoVoter::mnb_ovr:
                    v.ovr = classifiers::train_nb_ovr(stacked, y, K, NBKind::multinomial, cfg.alpha);
                    break;
                case StageTwoVoter::svm: {
                    auto svm_cfg = cfg.svm;
                    svm_cfg.seed = cfg.seed;
                    svm_cfg.loss = classifiers::LinearLoss::hinge;
                    v.linear = classifiers::train_linear(stacked, y, K, svm_cfg);
                    break;
                }
                case StageTwoVoter::bnb:
                    v.nb = classifiers::train_nb(stacked, y, K, NBKind::bernoulli, cfg.alpha);
                    break;
                case StageTwoVoter::knn_ovr:
                    v.knn = classifiers::train_knn(stacked, y, K, std::min(cfg.knn_k, n));
                    break;
                case StageTwoVoter::dummy:
                    v.dummy = classifiers::train_dummy(y, K);
                    break;
            }
            p.voters_.push_back(std::move(v));
        }
    });
    return p;
}

std::vector<ProbabilityMatrix> Mawdoo3Pipeline::stage_one_proba(const Corpus& corpus) const {
    check_registry(corpus, registry_);
    const auto ids = corpus.ids();
    const auto X = vectorizer_.transform(corpus.texts());
    std::vector<ProbabilityMatrix> out;
    out.push_back(build_matrix(ids, registry_, [&](std::size_t i) { return mnb_.predict_proba(X[i]); }));
    out.push_back(build_matrix(ids, registry_, [&](std::size_t i) { return logreg_.predict_proba(X[i]); }));
    out.push_back(build_matrix(ids, registry_, [&](std::size_t) { return dummy_.predict_proba(); }));
    return out;
}

std::vector<SparseVector> Mawdoo3Pipeline::stacked_features(const Corpus& corpus) const {
    const auto ids = corpus.ids();
    const auto mats = stage_one_proba(corpus);
    return features::stack_probability_features(mats, ids, vectorizer_.transform(corpus.texts()));
}

std::vector<std::vector<LabelIndex>> Mawdoo3Pipeline::voter_labels(const Corpus& corpus) const {
    const auto F = stacked_features(corpus);
    std::vector<std::vector<LabelIndex>> out;
    for (const auto& v : voters_) {
        std::vector<LabelIndex> labels;
        labels.reserve(F.size());
        for (const auto& x : F) {
            switch (v.kind) {
                case StageTwoVoter::mnb_ovr: labels.push_back(classifiers::argmax(v.ovr.predict_proba(x))); break;
                case StageTwoVoter::svm: labels.push_back(classifiers::argmax(v.linear.scores(x))); break;
                case StageTwoVoter::bnb: labels.push_back(classifiers::argmax(v.nb.predict_proba(x))); break;
                case StageTwoVoter::knn_ovr: labels.push_back(classifiers::argmax(v.knn.predict_proba(x))); break;
                case StageTwoVoter::dummy: labels.push_back(v.dummy.label()); break;
            }
        }
        out.push_back(std::move(labels));
    }
    return out;
}

Predictions Mawdoo3Pipeline::predict(const Corpus& corpus) const {
    const auto sets = stage("mawdoo3 predict", [&] { return voter_labels(corpus); });
    std::vector<Predictions> voters;
    for (const auto& s : sets) voters.push_back({corpus.ids(), s, registry_, std::nullopt});
    return hard_vote(voters);
}

void Mawdoo3Pipeline::write(BinaryWriter& w) const {
    vectorizer_.write(w);
    mnb_.write(w);
    logreg_.write(w);
    dummy_.write(w);
    w.u64(voters_.size());
    for (const auto& v : voters_) {
        w.str(to_string(v.kind));
        switch (v.kind) {
            case StageTwoVoter::mnb_ovr: v.ovr.write(w); break;
            case StageTwoVoter::svm: v.linear.write(w); break;
            case StageTwoVoter::bnb: v.nb.write(w); break;
            case StageTwoVoter::knn_ovr: v.knn.write(w); break;
            case StageTwoVoter::dummy: v.dummy.write(w); break;
        }
    }
}

Mawdoo3Pipeline Mawdoo3Pipeline::read(BinaryReader& r, const LabelRegistry& registry) {
    Mawdoo3Pipeline p;
    p.registry_ = registry;
    p.vectorizer_ = TextVectorizer::read(r);
    p.mnb_ = classifiers::NBModel::read(r);
    p.logreg_ = classifiers::LinearModel::read(r);
    p.dummy_ = classifiers::DummyModel::read(r);
    const auto n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
        Voter v{parse_stage_two_voter(r.str()), {}, {}, {}, {}, {}};
        switch (v.kind) {
            case StageTwoVoter::mnb_ovr: v.ovr = classifiers::OneVsRestNB::read(r); break;
            case StageTwoVoter::svm: v.linear = classifiers::LinearModel::read(r); break;
            case StageTwoVoter::bnb: v.nb = classifiers::NBModel::read(r); break;
            case StageTwoVoter::knn_ovr: v.knn = classifiers::KNNModel::read(r); break;
            case StageTwoVoter::dummy: v.dummy = classifiers::DummyModel::read(r); break;
        }
        p.voters_.push_back(std::move(v));
    }
    return p;
}

Predictions run_mawdoo3_pipeline(const Corpus& train, const Corpus& eval, const Mawdoo3Config& cfg) {
    return Mawdoo3Pipeline::train(train, cfg).predict(eval);
}

// ---------------------------------------------------------------------------
// JUST

JustPipeline JustPipeline::train(const Corpus& train, const JustConfig& cfg) {
    JustPipeline p;
    p.registry_ = train.registry;
    const std::size_t K = train.registry.size();
    const Corpus balanced = stage("just augmentation", [&] {
        return cfg.augment ? augmentation::balance_by_shuffle(train, {cfg.seed, std::nullopt}) : train;
    });
    const auto texts = balanced.texts();
    const auto y = stage("just", [&] { return balanced.label_indices(); });

    p.lm_ = stage("just char LM", [&] {
        return classifiers::train_charlm(texts, y, K, {cfg.lm_order, false, true});
    });
    stage("just TF-IDF", [&] {
        p.word_vec_ = TextVectorizer::fit(texts, Analyzer::words(1, 1), cfg.word_min_df, Weighting::tfidf);
        p.char_vec_ = TextVectorizer::fit(texts, Analyzer::chars(cfg.char_lo, cfg.char_hi),
                                          cfg.char_min_df, Weighting::tfidf);
    });
    const auto F = p.features(balanced);
    p.nb_ = stage("just MNB", [&] {
        return classifiers::train_nb_ovr(F, y, K, NBKind::multinomial, cfg.alpha);
    });
    return p;
}

std::size_t JustPipeline::feature_width() const {
    return registry_.size() + word_vec_.dimension() + char_vec_.dimension();
}

std::vector<SparseVector> JustPipeline::features(const Corpus& corpus) const {
    check_registry(corpus, registry_);
    std::vector<SparseVector> out;
    out.reserve(corpus.size());
    for (const auto& e : corpus.examples) {
        const SparseVector parts[3] = {SparseVector::from_dense(lm_.predict_proba(e.text)),
                                       word_vec_.transform(e.text), char_vec_.transform(e.text)};
        out.push_back(features::concat_features(parts));
    }
    return out;
}

ProbabilityMatrix JustPipeline::predict_proba(const Corpus& corpus) const {
    const auto F = features(corpus);
    return build_matrix(corpus.ids(), registry_, [&](std::size_t i) { return nb_.predict_proba(F[i]); });
}

void JustPipeline::write(BinaryWriter& w) const {
    lm_.write(w);
    word_vec_.write(w);
    char_vec_.write(w);
    nb_.write(w);
}

JustPipeline JustPipeline::read(BinaryReader& r, const LabelRegistry& registry) {
    JustPipeline p;
    p.registry_ = registry;
    p.lm_ = classifiers::ClassConditionalLM::read(r);
    p.word_vec_ = TextVectorizer::read(r);
    p.char_vec_ = TextVectorizer::read(r);
    p.nb_ = classifiers::OneVsRestNB::read(r);
    return p;
}

Predictions run_just_pipeline(const Corpus& train, const Corpus& eval, const JustConfig& cfg) {
    const auto model = JustPipeline::train(train, cfg);
    return argmax_labels(stage("just predict", [&] { return model.predict_proba(eval); }));
}

}  // namespace dialectid::ensembles
