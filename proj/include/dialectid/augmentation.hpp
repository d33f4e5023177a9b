#pragma once

#include <cstdint>
#include <optional>

#include "dialectid/corpus.hpp"

namespace dialectid::augmentation {

struct AugmentationConfig {
    std::uint64_t seed = 0;
    /// Per-class target count; defaults to the largest observed class count.
    /// Must not be below that count.
    std::optional<std::size_t> target;
};

/// Tops every class up to the target with token-shuffled copies of randomly
/// chosen (with replacement) examples of the same class. Originals are kept
/// in place; synthetic examples follow, grouped by class in registry order,
/// with ids `<source id>#aug<n>`.
Corpus balance_by_shuffle(const Corpus& corpus, const AugmentationConfig& cfg);

}  // namespace dialectid::augmentation
