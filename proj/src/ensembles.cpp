#include "dialectid/ensembles.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "dialectid/classifiers.hpp"
#include "dialectid/error.hpp"
#include "dialectid/text.hpp"
#include "io_util.hpp"

namespace dialectid::ensembles {

ProbabilityMatrix soft_vote(std::span<const ProbabilityMatrix> mats) {
    if (mats.empty()) throw ValidationError("soft_vote: no matrices");
    const auto& first = mats.front();
    for (std::size_t m = 1; m < mats.size(); ++m) {
        if (mats[m].registry() != first.registry())
            throw ValidationError("soft_vote: label order of matrix " + std::to_string(m) +
                                  " differs from matrix 0");
        if (mats[m].ids() != first.ids())
            throw ValidationError("soft_vote: ids of matrix " + std::to_string(m) +
                                  " differ from matrix 0");
    }
    // n * x / n can round away from x; identical inputs are returned as is.
    if (std::all_of(mats.begin(), mats.end(), [&](const auto& m) { return m.values() == first.values(); }))
        return first;
    std::vector<double> sum(first.values().size(), 0.0);
    for (const auto& m : mats)
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += m.values()[i];
    const double n = static_cast<double>(mats.size());
    for (auto& v : sum) v /= n;
    return ProbabilityMatrix(first.ids(), first.registry(), std::move(sum));
}

std::vector<LabelIndex> hard_vote(std::span<const std::vector<LabelIndex>> label_sets,
                                  std::size_t n_classes) {
    if (label_sets.empty()) throw ValidationError("hard_vote: no voters");
    const std::size_t n = label_sets.front().size();
    for (const auto& s : label_sets)
        if (s.size() != n) throw ValidationError("hard_vote: voters disagree on the number of examples");
    std::vector<LabelIndex> out(n);
    std::vector<std::size_t> votes(n_classes);
    for (std::size_t i = 0; i < n; ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        for (const auto& s : label_sets) {
            if (s[i] >= n_classes) throw ValidationError("hard_vote: label index out of range");
            ++votes[s[i]];
        }
        // max_element returns the first maximum, i.e. the lowest registry index.
        out[i] = static_cast<LabelIndex>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }
    return out;
}

Predictions hard_vote(std::span<const Predictions> voters) {
    if (voters.empty()) throw ValidationError("hard_vote: no voters");
    const auto& first = voters.front();
    std::vector<std::vector<LabelIndex>> sets;
    for (std::size_t v = 0; v < voters.size(); ++v) {
        if (voters[v].registry != first.registry)
            throw ValidationError("hard_vote: label registry of voter " + std::to_string(v) + " differs");
        if (voters[v].ids != first.ids)
            throw ValidationError("hard_vote: ids of voter " + std::to_string(v) + " differ from voter 0");
        sets.push_back(voters[v].labels);
    }
    const std::size_t K = first.registry.size();
    Predictions out;
    out.ids = first.ids;
    out.registry = first.registry;
    out.labels = hard_vote(sets, K);
    std::vector<double> shares(out.ids.size() * K, 0.0);
    for (const auto& s : sets)
        for (std::size_t i = 0; i < s.size(); ++i)
            shares[i * K + s[i]] += 1.0 / static_cast<double>(sets.size());
    out.probabilities = ProbabilityMatrix(out.ids, out.registry, std::move(shares));
    return out;
}

Predictions argmax_labels(const ProbabilityMatrix& m) {
    Predictions p;
    p.ids = m.ids();
    p.registry = m.registry();
    p.labels.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) p.labels.push_back(classifiers::argmax(m.row(i)));
    p.probabilities = m;
    return p;
}

void save_predictions(const Predictions& p, const std::filesystem::path& path) {
    std::string out = "id\tlabel\n";
    for (std::size_t i = 0; i < p.size(); ++i)
        out += p.ids[i] + '\t' + p.registry.label(p.labels[i]) + '\n';
    detail::write_file(path, out);
}

Predictions load_predictions(const std::filesystem::path& path, const LabelRegistry& registry) {
    auto lines = detail::read_lines(path);
    if (lines.empty() || lines[0] != "id\tlabel")
        throw ValidationError(path.string() + ": expected header id\\tlabel");
    Predictions p;
    p.registry = registry;
    std::unordered_set<std::string> seen;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        auto fields = detail::split(lines[n], '\t');
        const std::string where = path.string() + " line " + std::to_string(n + 1);
        if (fields.size() != 2) throw ValidationError("malformed row at " + where);
        auto label = registry.find(fields[1]);
        if (!label) throw ValidationError("unknown label " + fields[1] + " at " + where);
        if (!seen.insert(fields[0]).second) throw ValidationError("duplicate id " + fields[0] + " at " + where);
        p.ids.push_back(fields[0]);
        p.labels.push_back(*label);
    }
    return p;
}

std::vector<LexiconRule> load_lexicon_rules(const std::filesystem::path& path,
                                            const LabelRegistry& registry) {
    std::vector<LexiconRule> rules;
    std::unordered_set<long> priorities;
    auto lines = detail::read_lines(path);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        if (detail::trim(lines[n]).empty()) continue;
        const std::string where = path.string() + " line " + std::to_string(n + 1);
        auto fields = detail::split(lines[n], '\t');
        if (fields.size() != 3) throw ValidationError("malformed rule at " + where);
        if (fields[0].empty() || text::tokenize(fields[0]).size() != 1)
            throw ValidationError("rule token must be a single token at " + where);
        auto label = registry.find(fields[1]);
        if (!label) throw ValidationError("unknown label " + fields[1] + " at " + where);
        long priority = 0;
        auto res = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), priority);
        if (res.ec != std::errc() || res.ptr != fields[2].data() + fields[2].size())
            throw ValidationError("bad priority '" + fields[2] + "' at " + where);
        if (!priorities.insert(priority).second)
            throw ValidationError("duplicate priority " + fields[2] + " at " + where);
        rules.push_back({fields[0], *label, priority});
    }
    return rules;
}

Predictions apply_lexicon_rules(const Predictions& preds, std::span<const LexiconRule> rules,
                                const Corpus& corpus) {
    Predictions out = preds;
    if (rules.empty()) return out;

    std::vector<const LexiconRule*> ordered;
    for (const auto& r : rules) {
        if (r.label >= preds.registry.size()) throw ValidationError("lexicon rule label out of range");
        ordered.push_back(&r);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const LexiconRule* a, const LexiconRule* b) { return a->priority > b->priority; });

    std::unordered_map<std::string_view, const std::string*> texts;
    for (const auto& e : corpus.examples) texts.emplace(e.id, &e.text);
    for (std::size_t i = 0; i < out.size(); ++i) {
        auto it = texts.find(out.ids[i]);
        if (it == texts.end())
            throw ValidationError("apply_lexicon_rules: no text for id " + out.ids[i]);
        const auto tokens = text::tokenize(*it->second);
        const std::unordered_set<std::string_view> present(tokens.begin(), tokens.end());
        for (const auto* r : ordered) {
            if (present.count(r->token)) {
                out.labels[i] = r->label;
                break;
            }
        }
    }
    return out;
}

}  // namespace dialectid::ensembles
