#include "dialectid/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "dialectid/error.hpp"
#include "io_util.hpp"

namespace dialectid::features {

SparseVector::SparseVector(std::size_t dimension, std::vector<SparseEntry> entries)
    : dimension_(dimension) {
    entries_.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.index >= dimension)
            throw ValidationError("sparse index " + std::to_string(e.index) +
                                  " out of range for dimension " + std::to_string(dimension));
        if (i > 0 && e.index <= entries[i - 1].index)
            throw ValidationError("sparse indices must be strictly increasing");
        if (e.value != 0.0) entries_.push_back(e);
    }
}

SparseVector SparseVector::from_dense(std::span<const double> values) {
    SparseVector v(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] != 0.0) v.entries_.push_back({i, values[i]});
    return v;
}

double SparseVector::norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value * e.value;
    return std::sqrt(s);
}

double SparseVector::dot(const SparseVector& other) const {
    double s = 0.0;
    auto a = entries_.begin();
    auto b = other.entries_.begin();
    while (a != entries_.end() && b != other.entries_.end()) {
        if (a->index < b->index) {
            ++a;
        } else if (b->index < a->index) {
            ++b;
        } else {
            s += a->value * b->value;
            ++a, ++b;
        }
    }
    return s;
}

std::vector<double> SparseVector::to_dense() const {
    std::vector<double> out(dimension_, 0.0);
    for (const auto& e : entries_) out[e.index] = e.value;
    return out;
}

std::optional<std::size_t> Vocabulary::find(std::string_view term) const {
    auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double Vocabulary::idf(std::size_t i) const {
    return std::log((1.0 + static_cast<double>(n_documents_)) /
                    (1.0 + static_cast<double>(df_.at(i)))) +
           1.0;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
}

void Vocabulary::write(BinaryWriter& w) const {
    w.u64(n_documents_);
    w.strs(terms_);
    w.u64s(df_);
}

Vocabulary Vocabulary::read(BinaryReader& r) {
    Vocabulary v;
    v.n_documents_ = r.u64();
    v.terms_ = r.strs();
    v.df_ = r.u64s();
    if (v.df_.size() != v.terms_.size()) throw ValidationError("vocabulary payload is inconsistent");
    v.rebuild_index();
    return v;
}

Vocabulary fit_vocabulary(std::span<const Document> docs, std::size_t min_df) {
    if (docs.empty()) throw ValidationError("fit_vocabulary: empty document collection");
    if (min_df == 0) throw ValidationError("fit_vocabulary: min_df must be >= 1");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : docs) {
        std::unordered_set<std::string_view> seen;
        for (const auto& t : doc)
            if (seen.insert(t).second) ++df[t];
    }
    Vocabulary v;
    v.n_documents_ = docs.size();
    for (auto& [term, count] : df) {
        if (count < min_df) continue;
        v.terms_.push_back(term);
        v.df_.push_back(count);
    }
    v.rebuild_index();
    return v;
}

SparseVector count_transform(const Document& doc, const Vocabulary& vocab) {
    std::map<std::size_t, double> counts;
    for (const auto& t : doc)
        if (auto i = vocab.find(t)) counts[*i] += 1.0;
    std::vector<SparseEntry> entries;
    entries.reserve(counts.size());
    for (auto [i, c] : counts) entries.push_back({i, c});
    return SparseVector(vocab.size(), std::move(entries));
}

SparseVector tfidf_transform(const Document& doc, const Vocabulary& vocab) {
    auto counts = count_transform(doc, vocab);
    std::vector<SparseEntry> entries = counts.entries();
    double sq = 0.0;
    for (auto& e : entries) {
        e.value *= vocab.idf(e.index);
        sq += e.value * e.value;
    }
    if (sq > 0.0) {
        const double norm = std::sqrt(sq);
        for (auto& e : entries) e.value /= norm;
    }
    return SparseVector(vocab.size(), std::move(entries));
}

SparseVector concat_features(std::span<const SparseVector> parts) {
    std::size_t dim = 0;
    std::vector<SparseEntry> entries;
    for (const auto& p : parts) {
        for (const auto& e : p.entries()) entries.push_back({e.index + dim, e.value});
        dim += p.dimension();
    }
    return SparseVector(dim, std::move(entries));
}

std::vector<SparseVector> stack_probability_features(std::span<const ProbabilityMatrix> mats,
                                                     std::span<const std::string> tfidf_ids,
                                                     std::span<const SparseVector> tfidf) {
    if (tfidf_ids.size() != tfidf.size())
        throw ValidationError("stack_probability_features: ids and TF-IDF vectors differ in length");
    for (std::size_t m = 0; m < mats.size(); ++m) {
        const auto& ids = mats[m].ids();
        if (!std::equal(ids.begin(), ids.end(), tfidf_ids.begin(), tfidf_ids.end()))
            throw ValidationError("stack_probability_features: matrix " + std::to_string(m) +
                                  " ids do not match the TF-IDF ids");
        if (mats[m].registry() != mats[0].registry())
            throw ValidationError("stack_probability_features: label order differs between matrices");
    }
    std::vector<SparseVector> out;
    out.reserve(tfidf.size());
    std::vector<SparseVector> parts(mats.size() + 1);
    for (std::size_t i = 0; i < tfidf.size(); ++i) {
        for (std::size_t m = 0; m < mats.size(); ++m) parts[m] = SparseVector::from_dense(mats[m].row(i));
        parts.back() = tfidf[i];
        out.push_back(concat_features(parts));
    }
    return out;
}

Document Analyzer::operator()(std::string_view raw) const {
    if (lo == 0 || lo > hi) throw ValidationError("analyzer: invalid n-gram range");
    Document out;
    if (unit == Unit::word) {
        auto tokens = text::tokenize(raw);
        if (duplicate) tokens = text::tokenize(text::duplicate_words(tokens));
        for (std::size_t n = lo; n <= hi; ++n) {
            auto grams = text::word_ngrams(tokens, n);
            out.insert(out.end(), grams.begin(), grams.end());
        }
        return out;
    }
    if (duplicate) return text::char_ngram_range(text::duplicate_words(text::tokenize(raw)), lo, hi);
    return text::char_ngram_range(raw, lo, hi);
}

void Analyzer::write(BinaryWriter& w) const {
    w.u64(unit == Unit::word ? 0 : 1);
    w.u64(lo);
    w.u64(hi);
    w.boolean(duplicate);
}

Analyzer Analyzer::read(BinaryReader& r) {
    Analyzer a;
    const auto unit = r.u64();
    if (unit > 1) throw ValidationError("analyzer payload: bad unit");
    a.unit = unit == 0 ? Unit::word : Unit::character;
    a.lo = r.u64();
    a.hi = r.u64();
    a.duplicate = r.boolean();
    if (a.lo == 0 || a.lo > a.hi) throw ValidationError("analyzer payload: bad n-gram range");
    return a;
}

TextVectorizer TextVectorizer::fit(std::span<const std::string> texts, Analyzer analyzer,
                                   std::size_t min_df, Weighting weighting) {
    std::vector<Document> docs;
    docs.reserve(texts.size());
    for (const auto& t : texts) docs.push_back(analyzer(t));
    TextVectorizer v;
    v.analyzer_ = analyzer;
    v.vocab_ = fit_vocabulary(docs, min_df);
    v.weighting_ = weighting;
    return v;
}

SparseVector TextVectorizer::transform(std::string_view text) const {
    auto doc = analyzer_(text);
    return weighting_ == Weighting::tfidf ? tfidf_transform(doc, vocab_) : count_transform(doc, vocab_);
}

std::vector<SparseVector> TextVectorizer::transform(std::span<const std::string> texts) const {
    std::vector<SparseVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(transform(t));
    return out;
}

void TextVectorizer::write(BinaryWriter& w) const {
    analyzer_.write(w);
    w.u64(weighting_ == Weighting::tfidf ? 0 : 1);
    vocab_.write(w);
}

TextVectorizer TextVectorizer::read(BinaryReader& r) {
    TextVectorizer v;
    v.analyzer_ = Analyzer::read(r);
    const auto weighting = r.u64();
    if (weighting > 1) throw ValidationError("vectorizer payload: bad weighting");
    v.weighting_ = weighting == 0 ? Weighting::tfidf : Weighting::counts;
    v.vocab_ = Vocabulary::read(r);
    return v;
}

void EmbeddingTable::add(std::string word, std::vector<double> vec) {
    if (vec.size() != dimension_)
        throw ValidationError("embedding for '" + word + "' has dimension " +
                              std::to_string(vec.size()) + ", expected " +
                              std::to_string(dimension_));
    vectors_.try_emplace(std::move(word), std::move(vec));
}

const std::vector<double>* EmbeddingTable::find(std::string_view word) const {
    auto it = vectors_.find(std::string(word));
    return it == vectors_.end() ? nullptr : &it->second;
}

void EmbeddingTable::write(BinaryWriter& w) const {
    std::vector<const std::string*> words;
    words.reserve(vectors_.size());
    for (const auto& [word, vec] : vectors_) words.push_back(&word);
    std::sort(words.begin(), words.end(), [](auto* a, auto* b) { return *a < *b; });
    w.u64(dimension_);
    w.u64(words.size());
    for (const auto* word : words) {
        w.str(*word);
        for (double x : vectors_.at(*word)) w.f64(x);
    }
}

EmbeddingTable EmbeddingTable::read(BinaryReader& r) {
    EmbeddingTable t(r.u64());
    const auto n = r.size_of(8);
    for (std::size_t i = 0; i < n; ++i) {
        auto word = r.str();
        std::vector<double> vec(t.dimension_);
        for (auto& x : vec) x = r.f64();
        t.add(std::move(word), std::move(vec));
    }
    return t;
}

namespace {

bool is_integer(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    auto lines = detail::read_lines(path);
    std::optional<EmbeddingTable> table;
    std::optional<std::size_t> header_dim;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        auto fields = text::tokenize(lines[n]);
        if (fields.empty()) continue;
        const std::string where = path.string() + " line " + std::to_string(n + 1);
        if (n == 0 && fields.size() == 2 && is_integer(fields[0]) && is_integer(fields[1])) {
            header_dim = std::stoul(fields[1]);
            continue;
        }
        if (fields.size() < 2) throw ValidationError(where + ": word without a vector");
        std::vector<double> vec;
        vec.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i) {
            try {
                vec.push_back(parse_double(fields[i]));
            } catch (const ValidationError& e) {
                throw ValidationError(where + ": " + e.what());
            }
        }
        if (!table) {
            if (header_dim && *header_dim != vec.size())
                throw ValidationError(where + ": inconsistent dimension " +
                                      std::to_string(vec.size()) + ", header says " +
                                      std::to_string(*header_dim));
            table.emplace(vec.size());
        }
        if (vec.size() != table->dimension())
            throw ValidationError(where + ": inconsistent dimension " + std::to_string(vec.size()) +
                                  ", expected " + std::to_string(table->dimension()));
        table->add(std::move(fields[0]), std::move(vec));
    }
    if (!table) throw ValidationError(path.string() + ": no embedding vectors");
    return std::move(*table);
}

std::vector<double> pool_embedding(const text::TokenSequence& tokens, const EmbeddingTable& table) {
    std::vector<double> sum(table.dimension(), 0.0);
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        const auto* vec = table.find(t);
        if (!vec) continue;
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*vec)[i];
        ++hits;
    }
    if (hits > 0)
        for (auto& x : sum) x /= static_cast<double>(hits);
    return sum;
}

}  // namespace dialectid::features
