#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dialectid {

using LabelIndex = std::size_t;

/// Fixed, ordered set of class labels. Position in the registry is the class
/// index used by every model, matrix and report.
class LabelRegistry {
public:
    LabelRegistry() = default;
    explicit LabelRegistry(std::vector<std::string> labels);

    /// One label per line; blank lines are ignored.
    static LabelRegistry load(const std::filesystem::path& path);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    const std::string& label(LabelIndex i) const { return labels_.at(i); }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<LabelIndex> find(std::string_view label) const;
    /// Throws ValidationError naming the label when it is not registered.
    LabelIndex index_of(std::string_view label) const;

    friend bool operator==(const LabelRegistry& a, const LabelRegistry& b) {
        return a.labels_ == b.labels_;
    }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, LabelIndex> index_;
};

struct LabeledExample {
    std::string id;
    std::string text;
    std::optional<LabelIndex> label;
};

struct Corpus {
    std::vector<LabeledExample> examples;
    LabelRegistry registry;

    std::size_t size() const { return examples.size(); }
    bool labeled() const;
    std::vector<std::string> ids() const;
    std::vector<std::string> texts() const;
    /// Throws ValidationError if any example is unlabeled.
    std::vector<LabelIndex> label_indices() const;
};

/// Reads `id<TAB>text<TAB>label` (or `id<TAB>text` when `labeled` is false).
Corpus load_corpus(const std::filesystem::path& path, const LabelRegistry& registry,
                   bool labeled);

/// Writes the TSV form. Tabs, CR and LF inside text are replaced by spaces.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// Per-registry-label example counts, in registry order.
std::vector<std::size_t> corpus_stats(const Corpus& corpus);

std::string sanitize_text(std::string_view text);

/// Row-major |ids| x |labels| matrix of class probabilities. Construction
/// validates range and row sums; instances are always valid.
class ProbabilityMatrix {
public:
    static constexpr double kRowSumTolerance = 1e-6;

    ProbabilityMatrix() = default;
    ProbabilityMatrix(std::vector<std::string> ids, LabelRegistry registry,
                      std::vector<double> values);

    std::size_t rows() const { return ids_.size(); }
    std::size_t cols() const { return registry_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const LabelRegistry& registry() const { return registry_; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols(), cols()};
    }
    double at(std::size_t i, std::size_t c) const { return values_[i * cols() + c]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<std::string> ids_;
    LabelRegistry registry_;
    std::vector<double> values_;
};

/// CSV with header `id,<label1>,...,<labelK>`; the header labels must equal
/// the registry, in order.
ProbabilityMatrix load_probability_matrix(const std::filesystem::path& path,
                                          const LabelRegistry& registry);
void save_probability_matrix(const ProbabilityMatrix& m, const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace dialectid
