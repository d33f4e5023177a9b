#include "dialectid/dialectid.h"

#include <memory>
#include <new>
#include <string>
#include <vector>

#include "dialectid/augmentation.hpp"
#include "dialectid/corpus.hpp"
#include "dialectid/ensembles.hpp"
#include "dialectid/error.hpp"
#include "dialectid/evaluation.hpp"
#include "dialectid/model_io.hpp"
#include "dialectid/models.hpp"

using namespace dialectid;

struct did_registry {
    LabelRegistry value;
};
struct did_corpus {
    Corpus value;
};
struct did_model {
    std::unique_ptr<models::TextClassifier> value;
    std::string kind;
};
struct did_probs {
    ProbabilityMatrix value;
};
struct did_predictions {
    ensembles::Predictions value;
};
struct did_rules {
    std::vector<ensembles::LexiconRule> value;
};
struct did_report {
    evaluation::EvaluationReport value;
};

namespace {

thread_local std::string g_last_error;

did_status fail(did_status s, std::string msg) {
    g_last_error = std::move(msg);
    return s;
}

template <class F>
did_status guarded(F&& f) {
    try {
        f();
        return DID_OK;
    } catch (const IoError& e) {
        return fail(DID_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(DID_ERR_IO, "out of memory");
    } catch (const std::exception& e) {
        return fail(DID_ERR_VALIDATION, e.what());
    } catch (...) {
        return fail(DID_ERR_VALIDATION, "unknown error");
    }
}

bool missing(const void* p, const char* what, did_status& s) {
    if (p) return false;
    s = fail(DID_ERR_VALIDATION, std::string(what) + " must not be null");
    return true;
}

}  // namespace

#define DID_REQUIRE(ptr)                              \
    do {                                              \
        did_status s_;                                \
        if (missing((ptr), #ptr, s_)) return s_;      \
    } while (0)

extern "C" {

const char* did_last_error(void) { return g_last_error.c_str(); }
const char* did_version(void) { return "1.0.0"; }

// Registry

did_status did_registry_load(const char* path, did_registry** out) {
    DID_REQUIRE(path);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_registry{LabelRegistry::load(path)}; });
}

did_status did_registry_create(const char* const* labels, size_t n, did_registry** out) {
    DID_REQUIRE(out);
    if (n) DID_REQUIRE(labels);
    return guarded([&] {
        std::vector<std::string> v;
        for (size_t i = 0; i < n; ++i) {
            if (!labels[i]) throw ValidationError("label must not be null");
            v.emplace_back(labels[i]);
        }
        *out = new did_registry{LabelRegistry(std::move(v))};
    });
}

size_t did_registry_size(const did_registry* r) { return r ? r->value.size() : 0; }

const char* did_registry_label(const did_registry* r, size_t i) {
    if (!r || i >= r->value.size()) return nullptr;
    return r->value.label(i).c_str();
}

void did_registry_free(did_registry* r) { delete r; }

// Corpus

did_status did_corpus_load(const char* path, const did_registry* r, int labeled, did_corpus** out) {
    DID_REQUIRE(path);
    DID_REQUIRE(r);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_corpus{load_corpus(path, r->value, labeled != 0)}; });
}

did_status did_corpus_save(const did_corpus* c, const char* path) {
    DID_REQUIRE(c);
    DID_REQUIRE(path);
    return guarded([&] { save_corpus(c->value, path); });
}

size_t did_corpus_size(const did_corpus* c) { return c ? c->value.size() : 0; }

did_status did_corpus_stats(const did_corpus* c, size_t* counts, size_t n_counts) {
    DID_REQUIRE(c);
    DID_REQUIRE(counts);
    return guarded([&] {
        const auto stats = corpus_stats(c->value);
        if (n_counts != stats.size())
            throw ValidationError("counts buffer holds " + std::to_string(n_counts) +
                                  " entries, registry has " + std::to_string(stats.size()));
        for (size_t i = 0; i < stats.size(); ++i) counts[i] = stats[i];
    });
}

did_status did_corpus_balance(const did_corpus* c, uint64_t seed, size_t target, did_corpus** out) {
    DID_REQUIRE(c);
    DID_REQUIRE(out);
    return guarded([&] {
        augmentation::AugmentationConfig cfg{seed, std::nullopt};
        if (target) cfg.target = target;
        *out = new did_corpus{augmentation::balance_by_shuffle(c->value, cfg)};
    });
}

void did_corpus_free(did_corpus* c) { delete c; }

// Models

did_status did_model_train(const char* kind, const did_corpus* train, const char* const* keys,
                           const char* const* values, size_t n, did_model** out) {
    DID_REQUIRE(kind);
    DID_REQUIRE(train);
    DID_REQUIRE(out);
    if (n) {
        DID_REQUIRE(keys);
        DID_REQUIRE(values);
    }
    return guarded([&] {
        models::Hyperparameters hp;
        for (size_t i = 0; i < n; ++i) {
            if (!keys[i] || !values[i]) throw ValidationError("hyperparameter must not be null");
            if (!hp.emplace(keys[i], values[i]).second)
                throw ValidationError(std::string("duplicate hyperparameter '") + keys[i] + "'");
        }
        auto m = models::train_model(kind, train->value, hp);
        *out = new did_model{std::move(m), kind};
    });
}

did_status did_model_requires_seed(const char* kind, int* out) {
    DID_REQUIRE(kind);
    DID_REQUIRE(out);
    return guarded([&] { *out = models::requires_seed(kind) ? 1 : 0; });
}

did_status did_model_save(const did_model* m, const char* path) {
    DID_REQUIRE(m);
    DID_REQUIRE(path);
    return guarded([&] { save_model(m->value->to_container(), path); });
}

did_status did_model_load(const char* path, did_model** out) {
    DID_REQUIRE(path);
    DID_REQUIRE(out);
    return guarded([&] {
        const auto container = load_model(path);
        auto m = models::from_container(container);
        *out = new did_model{std::move(m), container.model_kind};
    });
}

const char* did_model_kind(const did_model* m) { return m ? m->kind.c_str() : nullptr; }

did_status did_model_check_registry(const did_model* m, const did_registry* r) {
    DID_REQUIRE(m);
    DID_REQUIRE(r);
    if (m->value->registry() == r->value) return DID_OK;
    return fail(DID_ERR_VALIDATION,
                "label registry mismatch: the labels file differs from the " + m->kind + " model's");
}

did_status did_model_predict(const did_model* m, const did_corpus* c, did_predictions** out) {
    DID_REQUIRE(m);
    DID_REQUIRE(c);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_predictions{m->value->predict(c->value)}; });
}

void did_model_free(did_model* m) { delete m; }

// Probability matrices

did_status did_probs_load(const char* path, const did_registry* r, did_probs** out) {
    DID_REQUIRE(path);
    DID_REQUIRE(r);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_probs{load_probability_matrix(path, r->value)}; });
}

did_status did_probs_save(const did_probs* p, const char* path) {
    DID_REQUIRE(p);
    DID_REQUIRE(path);
    return guarded([&] { save_probability_matrix(p->value, path); });
}

size_t did_probs_rows(const did_probs* p) { return p ? p->value.rows() : 0; }
size_t did_probs_cols(const did_probs* p) { return p ? p->value.cols() : 0; }

double did_probs_at(const did_probs* p, size_t row, size_t col) {
    if (!p || row >= p->value.rows() || col >= p->value.cols()) return 0.0;
    return p->value.at(row, col);
}

did_status did_soft_vote(const did_probs* const* mats, size_t n, did_probs** out) {
    DID_REQUIRE(mats);
    DID_REQUIRE(out);
    return guarded([&] {
        std::vector<ProbabilityMatrix> v;
        v.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            if (!mats[i]) throw ValidationError("probability matrix must not be null");
            v.push_back(mats[i]->value);
        }
        *out = new did_probs{ensembles::soft_vote(v)};
    });
}

did_status did_probs_argmax(const did_probs* p, did_predictions** out) {
    DID_REQUIRE(p);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_predictions{ensembles::argmax_labels(p->value)}; });
}

void did_probs_free(did_probs* p) { delete p; }

// Predictions

did_status did_predictions_load(const char* path, const did_registry* r, did_predictions** out) {
    DID_REQUIRE(path);
    DID_REQUIRE(r);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_predictions{ensembles::load_predictions(path, r->value)}; });
}

did_status did_predictions_save(const did_predictions* p, const char* path) {
    DID_REQUIRE(p);
    DID_REQUIRE(path);
    return guarded([&] { ensembles::save_predictions(p->value, path); });
}

size_t did_predictions_size(const did_predictions* p) { return p ? p->value.size() : 0; }

const char* did_predictions_id(const did_predictions* p, size_t i) {
    if (!p || i >= p->value.size()) return nullptr;
    return p->value.ids[i].c_str();
}

const char* did_predictions_label(const did_predictions* p, size_t i) {
    if (!p || i >= p->value.size()) return nullptr;
    return p->value.registry.label(p->value.labels[i]).c_str();
}

did_status did_predictions_probs(const did_predictions* p, did_probs** out) {
    DID_REQUIRE(p);
    DID_REQUIRE(out);
    if (!p->value.probabilities) return fail(DID_ERR_VALIDATION, "predictions carry no probabilities");
    return guarded([&] { *out = new did_probs{*p->value.probabilities}; });
}

did_status did_hard_vote(const did_predictions* const* voters, size_t n, did_predictions** out) {
    DID_REQUIRE(voters);
    DID_REQUIRE(out);
    return guarded([&] {
        std::vector<ensembles::Predictions> v;
        v.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            if (!voters[i]) throw ValidationError("predictions must not be null");
            v.push_back(voters[i]->value);
        }
        *out = new did_predictions{ensembles::hard_vote(v)};
    });
}

void did_predictions_free(did_predictions* p) { delete p; }

// Lexicon rules

did_status did_rules_load(const char* path, const did_registry* r, did_rules** out) {
    DID_REQUIRE(path);
    DID_REQUIRE(r);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_rules{ensembles::load_lexicon_rules(path, r->value)}; });
}

size_t did_rules_size(const did_rules* rules) { return rules ? rules->value.size() : 0; }

did_status did_rules_apply(const did_predictions* p, const did_rules* rules, const did_corpus* c,
                           did_predictions** out) {
    DID_REQUIRE(p);
    DID_REQUIRE(rules);
    DID_REQUIRE(c);
    DID_REQUIRE(out);
    return guarded([&] {
        *out = new did_predictions{ensembles::apply_lexicon_rules(p->value, rules->value, c->value)};
    });
}

void did_rules_free(did_rules* rules) { delete rules; }

// Evaluation

did_status did_evaluate(const did_corpus* gold, const did_predictions* p, did_report** out) {
    DID_REQUIRE(gold);
    DID_REQUIRE(p);
    DID_REQUIRE(out);
    return guarded([&] { *out = new did_report{evaluation::evaluate(gold->value, p->value)}; });
}

double did_report_accuracy(const did_report* r) { return r ? r->value.accuracy : 0.0; }
double did_report_micro_f1(const did_report* r) { return r ? r->value.micro_f1 : 0.0; }
double did_report_macro_f1(const did_report* r) { return r ? r->value.macro_f1 : 0.0; }
size_t did_report_examples(const did_report* r) { return r ? r->value.n_examples : 0; }

did_status did_report_write(const did_report* r, did_report_format format, const char* path) {
    DID_REQUIRE(r);
    DID_REQUIRE(path);
    evaluation::ReportFormat f;
    switch (format) {
        case DID_REPORT_TEXT: f = evaluation::ReportFormat::text; break;
        case DID_REPORT_CSV: f = evaluation::ReportFormat::csv; break;
        case DID_REPORT_JSON: f = evaluation::ReportFormat::json; break;
        default: return fail(DID_ERR_VALIDATION, "unknown report format");
    }
    return guarded([&] { evaluation::emit_report(r->value, f, path); });
}

did_status did_report_confusion_csv(const did_report* r, const char* path, int row_normalized) {
    DID_REQUIRE(r);
    DID_REQUIRE(path);
    return guarded([&] { evaluation::emit_confusion_csv(r->value, path, row_normalized != 0); });
}

void did_report_free(did_report* r) { delete r; }

}  // extern "C"
