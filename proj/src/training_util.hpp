#pragma once

#include <cmath>
#include <span>
#include <string>

#include "dialectid/corpus.hpp"
#include "dialectid/error.hpp"
#include "dialectid/features.hpp"

namespace dialectid::detail {

inline void check_labels(std::span<const LabelIndex> y, std::size_t n_classes, const char* who) {
    if (n_classes == 0) throw ValidationError(std::string(who) + ": no classes");
    for (auto c : y)
        if (c >= n_classes)
            throw ValidationError(std::string(who) + ": label index " + std::to_string(c) +
                                  " out of range");
}

inline void check_training_set(std::span<const features::SparseVector> X,
                               std::span<const LabelIndex> y, std::size_t n_classes,
                               const char* who) {
    if (X.empty()) throw ValidationError(std::string(who) + ": empty training set");
    if (X.size() != y.size())
        throw ValidationError(std::string(who) + ": " + std::to_string(X.size()) +
                              " examples but " + std::to_string(y.size()) + " labels");
    check_labels(y, n_classes, who);
    const auto dim = X.front().dimension();
    for (const auto& x : X) {
        if (x.dimension() != dim)
            throw ValidationError(std::string(who) + ": inconsistent feature dimensions");
        for (const auto& e : x.entries())
            if (!std::isfinite(e.value))
                throw ValidationError(std::string(who) + ": non-finite feature value");
    }
}

}  // namespace dialectid::detail
