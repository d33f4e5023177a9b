#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dialectid/corpus.hpp"

namespace dialectid::ensembles {

/// Final per-example decisions. `probabilities`, when present, is aligned
/// with `ids` and `labels[i]` is its row argmax unless a lexicon rule
/// overrode it.
struct Predictions {
    std::vector<std::string> ids;
    std::vector<LabelIndex> labels;
    LabelRegistry registry;
    std::optional<ProbabilityMatrix> probabilities;

    std::size_t size() const { return ids.size(); }
};

/// Element-wise mean of the matrices. All inputs must share ids (in order)
/// and label order.
ProbabilityMatrix soft_vote(std::span<const ProbabilityMatrix> mats);

/// Per example, the most voted label; ties go to the lowest registry index.
/// `label_sets[v][i]` is voter v's label for example i.
std::vector<LabelIndex> hard_vote(std::span<const std::vector<LabelIndex>> label_sets,
                                  std::size_t n_classes);

/// Majority over aligned prediction sets. The result carries the vote-share
/// matrix as its probabilities.
Predictions hard_vote(std::span<const Predictions> voters);

/// Row argmax; ties go to the lowest registry index.
Predictions argmax_labels(const ProbabilityMatrix& m);

/// `id<TAB>label` with that header.
void save_predictions(const Predictions& p, const std::filesystem::path& path);
Predictions load_predictions(const std::filesystem::path& path, const LabelRegistry& registry);

struct LexiconRule {
    std::string token;
    LabelIndex label;
    long priority;
};

/// TSV `token<TAB>label<TAB>priority`, no header. Priorities must be unique.
std::vector<LexiconRule> load_lexicon_rules(const std::filesystem::path& path,
                                            const LabelRegistry& registry);

/// For every prediction whose text contains a rule token as a whole token,
/// the highest-priority such rule sets the label. Probability rows are kept.
Predictions apply_lexicon_rules(const Predictions& preds, std::span<const LexiconRule> rules,
                                const Corpus& corpus);

}  // namespace dialectid::ensembles
