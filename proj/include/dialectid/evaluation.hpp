#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dialectid/corpus.hpp"
#include "dialectid/ensembles.hpp"

namespace dialectid::evaluation {

/// K x K counts; rows are gold labels, columns predicted labels.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t n_classes)
        : n_(n_classes), counts_(n_classes * n_classes, 0) {}

    std::size_t n_classes() const { return n_; }
    std::size_t at(std::size_t gold, std::size_t pred) const { return counts_[gold * n_ + pred]; }
    void add(std::size_t gold, std::size_t pred) { ++counts_[gold * n_ + pred]; }
    std::size_t total() const;
    std::size_t row_sum(std::size_t gold) const;
    std::size_t col_sum(std::size_t pred) const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> counts_;
};

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvaluationReport {
    LabelRegistry registry;
    std::size_t n_examples = 0;
    double accuracy = 0.0;
    double micro_f1 = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassScores> per_class;
    ConfusionMatrix confusion;
};

/// Scores aligned label sequences. Macro-F1 averages over every registry
/// label, including labels absent from both sides. Zero denominators give 0.
EvaluationReport evaluate_labels(std::span<const LabelIndex> gold, std::span<const LabelIndex> pred,
                                 const LabelRegistry& registry);

/// Matches predictions to gold examples by id. Throws ValidationError listing
/// missing ids when the two id sets differ.
EvaluationReport evaluate(const Corpus& gold, const ensembles::Predictions& preds);

enum class ReportFormat { text, csv, json };

std::string render_report(const EvaluationReport& r, ReportFormat format);
void emit_report(const EvaluationReport& r, ReportFormat format, const std::filesystem::path& path);

/// Label-headed confusion grid. With `row_normalized` each row is divided by
/// its gold support (all-zero rows stay zero).
std::string render_confusion_csv(const EvaluationReport& r, bool row_normalized = false);
void emit_confusion_csv(const EvaluationReport& r, const std::filesystem::path& path,
                        bool row_normalized = false);

}  // namespace dialectid::evaluation
