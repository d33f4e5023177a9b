#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dialectid/corpus.hpp"
#include "dialectid/serialize.hpp"
#include "dialectid/text.hpp"

namespace dialectid::features {

struct SparseEntry {
    std::size_t index;
    double value;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sorted (index, value) pairs with no explicit zeros.
class SparseVector {
public:
    SparseVector() = default;
    explicit SparseVector(std::size_t dimension) : dimension_(dimension) {}
    /// Drops zero entries; throws ValidationError on unsorted, duplicate or
    /// out-of-range indices.
    SparseVector(std::size_t dimension, std::vector<SparseEntry> entries);

    static SparseVector from_dense(std::span<const double> values);

    std::size_t dimension() const { return dimension_; }
    const std::vector<SparseEntry>& entries() const { return entries_; }
    std::size_t nnz() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    double norm() const;
    double dot(const SparseVector& other) const;
    std::vector<double> to_dense() const;

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

private:
    std::size_t dimension_ = 0;
    std::vector<SparseEntry> entries_;
};

using Document = std::vector<std::string>;

/// Term -> index map with document frequencies. Indices follow lexicographic
/// (byte-wise) term order.
class Vocabulary {
public:
    std::size_t size() const { return terms_.size(); }
    std::size_t n_documents() const { return n_documents_; }
    const std::string& term(std::size_t i) const { return terms_.at(i); }
    std::size_t df(std::size_t i) const { return df_.at(i); }
    std::optional<std::size_t> find(std::string_view term) const;
    /// ln((1 + N) / (1 + df)) + 1
    double idf(std::size_t i) const;

    void write(BinaryWriter& w) const;
    static Vocabulary read(BinaryReader& r);

private:
    friend Vocabulary fit_vocabulary(std::span<const Document> docs, std::size_t min_df);
    void rebuild_index();

    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::size_t n_documents_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Keeps the terms whose document frequency is at least `min_df`.
Vocabulary fit_vocabulary(std::span<const Document> docs, std::size_t min_df = 1);

/// count(t, doc) * idf(t), L2-normalized. Out-of-vocabulary terms are ignored.
SparseVector tfidf_transform(const Document& doc, const Vocabulary& vocab);
/// Raw in-vocabulary term counts.
SparseVector count_transform(const Document& doc, const Vocabulary& vocab);

/// Part i's indices are shifted by the summed dimensions of parts 0..i-1.
SparseVector concat_features(std::span<const SparseVector> parts);

/// Per example: each matrix's probability row followed by its TF-IDF vector.
/// `tfidf_ids` gives the example id of each TF-IDF vector and must match the
/// matrices' ids in order.
std::vector<SparseVector> stack_probability_features(std::span<const ProbabilityMatrix> mats,
                                                     std::span<const std::string> tfidf_ids,
                                                     std::span<const SparseVector> tfidf);

/// How raw text becomes a term sequence.
struct Analyzer {
    enum class Unit { word, character };

    Unit unit = Unit::word;
    std::size_t lo = 1;
    std::size_t hi = 1;
    /// Apply word duplication before extracting terms.
    bool duplicate = false;

    static Analyzer words(std::size_t lo = 1, std::size_t hi = 1) { return {Unit::word, lo, hi, false}; }
    static Analyzer chars(std::size_t lo, std::size_t hi, bool duplicate = false) {
        return {Unit::character, lo, hi, duplicate};
    }

    Document operator()(std::string_view text) const;

    void write(BinaryWriter& w) const;
    static Analyzer read(BinaryReader& r);
};

enum class Weighting { tfidf, counts };

/// A fitted analyzer + vocabulary pair.
class TextVectorizer {
public:
    TextVectorizer() = default;
    static TextVectorizer fit(std::span<const std::string> texts, Analyzer analyzer,
                              std::size_t min_df, Weighting weighting);

    SparseVector transform(std::string_view text) const;
    std::vector<SparseVector> transform(std::span<const std::string> texts) const;

    const Vocabulary& vocabulary() const { return vocab_; }
    const Analyzer& analyzer() const { return analyzer_; }
    std::size_t dimension() const { return vocab_.size(); }

    void write(BinaryWriter& w) const;
    static TextVectorizer read(BinaryReader& r);

private:
    Analyzer analyzer_;
    Vocabulary vocab_;
    Weighting weighting_ = Weighting::tfidf;
};

class EmbeddingTable {
public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }
    /// Throws ValidationError when the vector length differs from the table's.
    void add(std::string word, std::vector<double> vec);
    const std::vector<double>* find(std::string_view word) const;

    void write(BinaryWriter& w) const;
    static EmbeddingTable read(BinaryReader& r);

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Word-vector text format: `word v1 ... vd` per line, optionally preceded by
/// a `<count> <dimension>` header line.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

/// Mean of the in-vocabulary token vectors; the zero vector when none are.
std::vector<double> pool_embedding(const text::TokenSequence& tokens, const EmbeddingTable& table);

}  // namespace dialectid::features
