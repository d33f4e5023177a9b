#include "dialectid/augmentation.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "dialectid/error.hpp"
#include "dialectid/text.hpp"

namespace dialectid::augmentation {

Corpus balance_by_shuffle(const Corpus& corpus, const AugmentationConfig& cfg) {
    const auto counts = corpus_stats(corpus);
    const std::size_t K = counts.size();
    std::vector<std::vector<std::size_t>> members(K);
    for (std::size_t i = 0; i < corpus.size(); ++i) members[*corpus.examples[i].label].push_back(i);
    for (std::size_t c = 0; c < K; ++c)
        if (members[c].empty())
            throw ValidationError("balance_by_shuffle: class " + corpus.registry.label(c) +
                                  " has no examples");

    const std::size_t max_count = *std::max_element(counts.begin(), counts.end());
    const std::size_t target = cfg.target.value_or(max_count);
    if (target < max_count)
        throw ValidationError("balance_by_shuffle: target " + std::to_string(target) +
                              " is below the largest class count " + std::to_string(max_count));

    Corpus out = corpus;
    std::unordered_set<std::string> ids;
    for (const auto& e : corpus.examples) ids.insert(e.id);

    std::mt19937_64 rng(cfg.seed);
    std::size_t serial = 0;
    for (std::size_t c = 0; c < K; ++c) {
        std::uniform_int_distribution<std::size_t> pick(0, members[c].size() - 1);
        for (std::size_t n = counts[c]; n < target; ++n) {
            const auto& src = corpus.examples[members[c][pick(rng)]];
            auto tokens = text::tokenize(src.text);
            std::shuffle(tokens.begin(), tokens.end(), rng);
            std::string id;
            do {
                id = src.id + "#aug" + std::to_string(++serial);
            } while (ids.count(id));
            ids.insert(id);
            out.examples.push_back({std::move(id), text::join(tokens), c});
        }
    }
    return out;
}

}  // namespace dialectid::augmentation
