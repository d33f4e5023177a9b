#include <algorithm>
#include <cmath>
#include <set>

#include "dialectid/classifiers.hpp"
#include "dialectid/error.hpp"
#include "dialectid/text.hpp"
#include "training_util.hpp"

namespace dialectid::classifiers {
namespace {

std::u32string preprocess(std::string_view raw, const CharLMConfig& cfg) {
    if (cfg.duplicate_words) return text::decode_utf8(text::duplicate_words(text::tokenize(raw)));
    return text::decode_utf8(raw);
}

}  // namespace

std::u32string ClassConditionalLM::symbols(std::string_view raw) const {
    std::u32string seq;
    const auto chars = preprocess(raw, cfg_);
    seq.reserve(chars.size() + 2);
    if (cfg_.boundary_symbols) seq.push_back(kBos);
    for (char32_t ch : chars)
        seq.push_back(std::binary_search(alphabet_.begin(), alphabet_.end(), ch) ? ch : kUnk);
    if (cfg_.boundary_symbols) seq.push_back(kEos);
    return seq;
}

double ClassConditionalLM::prob_in(const ClassTable& t, std::u32string_view context,
                                   char32_t symbol) const {
    if (!std::binary_search(alphabet_.begin(), alphabet_.end(), symbol)) symbol = kUnk;

    // Deepest-first chain of trie nodes matching suffixes of the context.
    const Node* chain[64];
    std::size_t depth = 0;
    chain[depth++] = &t.nodes[0];
    const std::size_t max_len = std::min<std::size_t>(cfg_.order - 1, context.size());
    const Node* node = &t.nodes[0];
    for (std::size_t j = 0; j < max_len && depth < 64; ++j) {
        const char32_t s = context[context.size() - 1 - j];
        auto it = node->children.find(s);
        if (it == node->children.end()) break;
        node = &t.nodes[it->second];
        chain[depth++] = node;
    }

    const Node& root = *chain[0];
    auto count_of = [symbol](const Node& n) -> double {
        auto it = n.next.find(symbol);
        return it == n.next.end() ? 0.0 : static_cast<double>(it->second);
    };
    double p = (count_of(root) + 1.0) /
               (static_cast<double>(root.total) + static_cast<double>(alphabet_.size()));
    for (std::size_t d = 1; d < depth; ++d) {
        const Node& n = *chain[d];
        const double distinct = static_cast<double>(n.next.size());
        p = (count_of(n) + distinct * p) / (static_cast<double>(n.total) + distinct);
    }
    return p;
}

double ClassConditionalLM::prob(LabelIndex c, std::u32string_view context, char32_t symbol) const {
    return prob_in(classes_.at(c), context, symbol);
}

std::size_t ClassConditionalLM::predicted_count(std::string_view text) const {
    const auto seq = symbols(text);
    return cfg_.boundary_symbols ? seq.size() - 1 : seq.size();
}

double ClassConditionalLM::log_prob(LabelIndex c, std::string_view text) const {
    const auto& t = classes_.at(c);
    const auto seq = symbols(text);
    const std::u32string_view view(seq);
    double total = 0.0;
    for (std::size_t i = cfg_.boundary_symbols ? 1 : 0; i < seq.size(); ++i) {
        const std::size_t from = i >= cfg_.order - 1 ? i - (cfg_.order - 1) : 0;
        total += std::log(prob_in(t, view.substr(from, i - from), seq[i]));
    }
    return total;
}

std::vector<double> ClassConditionalLM::predict_proba(std::string_view text) const {
    const std::size_t K = classes_.size();
    if (preprocess(text, cfg_).empty()) return std::vector<double>(K, 1.0 / static_cast<double>(K));
    const double n = static_cast<double>(predicted_count(text));
    std::vector<double> scores(K);
    for (std::size_t c = 0; c < K; ++c) scores[c] = log_prob(c, text) / n;
    return softmax(scores);
}

std::vector<std::u32string> ClassConditionalLM::observed_contexts(LabelIndex c) const {
    const auto& t = classes_.at(c);
    std::vector<std::u32string> out;
    // (node, reversed context) pairs
    std::vector<std::pair<std::uint32_t, std::u32string>> stack{{0, U""}};
    while (!stack.empty()) {
        auto [id, rev] = std::move(stack.back());
        stack.pop_back();
        out.emplace_back(rev.rbegin(), rev.rend());
        for (const auto& [sym, child] : t.nodes[id].children) stack.emplace_back(child, rev + sym);
    }
    return out;
}

ClassConditionalLM train_charlm(std::span<const std::string> texts, std::span<const LabelIndex> y,
                                std::size_t n_classes, const CharLMConfig& cfg) {
    if (texts.size() != y.size()) throw ValidationError("train_charlm: texts and labels differ in length");
    detail::check_labels(y, n_classes, "train_charlm");
    if (cfg.order == 0 || cfg.order > 32) throw ValidationError("train_charlm: order must be in [1, 32]");

    std::vector<std::size_t> per_class(n_classes, 0);
    for (auto c : y) ++per_class[c];
    for (std::size_t c = 0; c < n_classes; ++c)
        if (per_class[c] == 0)
            throw ValidationError("train_charlm: class " + std::to_string(c) + " has no training data");

    ClassConditionalLM m;
    m.cfg_ = cfg;
    std::set<char32_t> alphabet{ClassConditionalLM::kUnk};
    if (cfg.boundary_symbols) alphabet.insert(ClassConditionalLM::kEos);
    for (const auto& t : texts)
        for (char32_t ch : preprocess(t, cfg)) alphabet.insert(ch);
    m.alphabet_.assign(alphabet.begin(), alphabet.end());
    m.classes_.resize(n_classes);

    for (std::size_t i = 0; i < texts.size(); ++i) {
        auto& table = m.classes_[y[i]];
        const auto seq = m.symbols(texts[i]);
        for (std::size_t pos = cfg.boundary_symbols ? 1 : 0; pos < seq.size(); ++pos) {
            const char32_t w = seq[pos];
            const std::size_t from = pos >= cfg.order - 1 ? pos - (cfg.order - 1) : 0;
            std::uint32_t node = 0;
            ++table.nodes[node].total;
            ++table.nodes[node].next[w];
            for (std::size_t j = pos; j-- > from;) {
                auto [it, inserted] = table.nodes[node].children.try_emplace(
                    seq[j], static_cast<std::uint32_t>(table.nodes.size()));
                const std::uint32_t child = it->second;
                if (inserted) table.nodes.emplace_back();
                node = child;
                ++table.nodes[node].total;
                ++table.nodes[node].next[w];
            }
        }
    }
    return m;
}

void ClassConditionalLM::write(BinaryWriter& w) const {
    w.u64(cfg_.order);
    w.boolean(cfg_.duplicate_words);
    w.boolean(cfg_.boundary_symbols);
    w.u64(alphabet_.size());
    for (char32_t ch : alphabet_) w.u64(ch);
    w.u64(classes_.size());
    for (const auto& t : classes_) {
        w.u64(t.nodes.size());
        for (const auto& n : t.nodes) {
            w.u64(n.total);
            w.u64(n.next.size());
            for (auto [sym, count] : n.next) {
                w.u64(sym);
                w.u64(count);
            }
            w.u64(n.children.size());
            for (auto [sym, child] : n.children) {
                w.u64(sym);
                w.u64(child);
            }
        }
    }
}

ClassConditionalLM ClassConditionalLM::read(BinaryReader& r) {
    ClassConditionalLM m;
    m.cfg_.order = r.u64();
    m.cfg_.duplicate_words = r.boolean();
    m.cfg_.boundary_symbols = r.boolean();
    if (m.cfg_.order == 0 || m.cfg_.order > 32) throw ValidationError("char LM payload: bad order");
    m.alphabet_.resize(r.size_of(8));
    for (auto& ch : m.alphabet_) ch = static_cast<char32_t>(r.u64());
    if (!std::is_sorted(m.alphabet_.begin(), m.alphabet_.end()))
        throw ValidationError("char LM payload: alphabet not sorted");
    m.classes_.resize(r.size_of(8));
    for (auto& t : m.classes_) {
        t.nodes.resize(r.size_of(24));
        for (auto& n : t.nodes) {
            n.total = r.u64();
            const auto next = r.size_of(16);
            for (std::size_t i = 0; i < next; ++i) {
                const auto sym = static_cast<char32_t>(r.u64());
                n.next[sym] = r.u64();
            }
            const auto children = r.size_of(16);
            for (std::size_t i = 0; i < children; ++i) {
                const auto sym = static_cast<char32_t>(r.u64());
                const auto child = r.u64();
                if (child >= t.nodes.size()) throw ValidationError("char LM payload: bad child index");
                n.children[sym] = static_cast<std::uint32_t>(child);
            }
        }
        if (t.nodes.empty()) throw ValidationError("char LM payload: empty class table");
    }
    return m;
}

}  // namespace dialectid::classifiers
