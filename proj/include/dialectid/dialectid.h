#ifndef DIALECTID_H
#define DIALECTID_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DID_API __declspec(dllexport)
#else
#define DID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure the message is available
 * from did_last_error() until the next failing call on the same thread. */
typedef enum did_status {
    DID_OK = 0,
    DID_ERR_IO = 1,
    DID_ERR_VALIDATION = 2
} did_status;

typedef enum did_report_format {
    DID_REPORT_TEXT = 0,
    DID_REPORT_CSV = 1,
    DID_REPORT_JSON = 2
} did_report_format;

typedef struct did_registry did_registry;
typedef struct did_corpus did_corpus;
typedef struct did_model did_model;
typedef struct did_probs did_probs;
typedef struct did_predictions did_predictions;
typedef struct did_rules did_rules;
typedef struct did_report did_report;

DID_API const char* did_last_error(void);
DID_API const char* did_version(void);

/* Label registry: one label per line, order defines the class index. */
DID_API did_status did_registry_load(const char* path, did_registry** out);
DID_API did_status did_registry_create(const char* const* labels, size_t n, did_registry** out);
DID_API size_t did_registry_size(const did_registry* r);
/* NULL when i is out of range. Owned by the registry. */
DID_API const char* did_registry_label(const did_registry* r, size_t i);
DID_API void did_registry_free(did_registry* r);

/* Corpora: TSV with header id, text and (when labeled) label. */
DID_API did_status did_corpus_load(const char* path, const did_registry* r, int labeled,
                                   did_corpus** out);
DID_API did_status did_corpus_save(const did_corpus* c, const char* path);
DID_API size_t did_corpus_size(const did_corpus* c);
/* Fills counts[0..registry size) with per-label example counts. */
DID_API did_status did_corpus_stats(const did_corpus* c, size_t* counts, size_t n_counts);
/* Shuffle-based class balancing. target 0 means the largest class count. */
DID_API did_status did_corpus_balance(const did_corpus* c, uint64_t seed, size_t target,
                                      did_corpus** out);
DID_API void did_corpus_free(did_corpus* c);

/* Models. keys/values are n parallel hyperparameter strings. */
DID_API did_status did_model_train(const char* kind, const did_corpus* train,
                                   const char* const* keys, const char* const* values, size_t n,
                                   did_model** out);
/* Sets *out to 1 when the kind is stochastic and takes a `seed`. */
DID_API did_status did_model_requires_seed(const char* kind, int* out);
DID_API did_status did_model_save(const did_model* m, const char* path);
DID_API did_status did_model_load(const char* path, did_model** out);
DID_API const char* did_model_kind(const did_model* m);
/* DID_ERR_VALIDATION when the model was trained with another label registry. */
DID_API did_status did_model_check_registry(const did_model* m, const did_registry* r);
DID_API did_status did_model_predict(const did_model* m, const did_corpus* c,
                                     did_predictions** out);
DID_API void did_model_free(did_model* m);

/* Probability matrices: CSV with header id, label1, ..., labelK. */
DID_API did_status did_probs_load(const char* path, const did_registry* r, did_probs** out);
DID_API did_status did_probs_save(const did_probs* p, const char* path);
DID_API size_t did_probs_rows(const did_probs* p);
DID_API size_t did_probs_cols(const did_probs* p);
DID_API double did_probs_at(const did_probs* p, size_t row, size_t col);
DID_API did_status did_soft_vote(const did_probs* const* mats, size_t n, did_probs** out);
DID_API did_status did_probs_argmax(const did_probs* p, did_predictions** out);
DID_API void did_probs_free(did_probs* p);

/* Predicted labels: TSV with header id, label. */
DID_API did_status did_predictions_load(const char* path, const did_registry* r,
                                        did_predictions** out);
DID_API did_status did_predictions_save(const did_predictions* p, const char* path);
DID_API size_t did_predictions_size(const did_predictions* p);
DID_API const char* did_predictions_id(const did_predictions* p, size_t i);
DID_API const char* did_predictions_label(const did_predictions* p, size_t i);
/* Copy of the attached probability rows; DID_ERR_VALIDATION when absent. */
DID_API did_status did_predictions_probs(const did_predictions* p, did_probs** out);
DID_API did_status did_hard_vote(const did_predictions* const* voters, size_t n,
                                 did_predictions** out);
DID_API void did_predictions_free(did_predictions* p);

/* Lexicon rules: TSV token, label, priority without a header. */
DID_API did_status did_rules_load(const char* path, const did_registry* r, did_rules** out);
DID_API size_t did_rules_size(const did_rules* rules);
DID_API did_status did_rules_apply(const did_predictions* p, const did_rules* rules,
                                   const did_corpus* c, did_predictions** out);
DID_API void did_rules_free(did_rules* rules);

/* Evaluation. */
DID_API did_status did_evaluate(const did_corpus* gold, const did_predictions* p,
                                did_report** out);
DID_API double did_report_accuracy(const did_report* r);
DID_API double did_report_micro_f1(const did_report* r);
DID_API double did_report_macro_f1(const did_report* r);
DID_API size_t did_report_examples(const did_report* r);
DID_API did_status did_report_write(const did_report* r, did_report_format format,
                                    const char* path);
DID_API did_status did_report_confusion_csv(const did_report* r, const char* path,
                                            int row_normalized);
DID_API void did_report_free(did_report* r);

#ifdef __cplusplus
}
#endif

#endif
