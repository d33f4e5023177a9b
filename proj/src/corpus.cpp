#include "dialectid/corpus.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dialectid/error.hpp"
#include "io_util.hpp"

namespace dialectid {

LabelRegistry::LabelRegistry(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ValidationError("label registry is empty");
    for (LabelIndex i = 0; i < labels_.size(); ++i) {
        if (labels_[i].empty()) throw ValidationError("empty label at position " + std::to_string(i));
        if (!index_.emplace(labels_[i], i).second)
            throw ValidationError("duplicate label " + labels_[i]);
    }
}

LabelRegistry LabelRegistry::load(const std::filesystem::path& path) {
    std::vector<std::string> labels;
    for (auto& line : detail::read_lines(path)) {
        auto trimmed = detail::trim(line);
        if (!trimmed.empty()) labels.emplace_back(trimmed);
    }
    if (labels.empty()) throw ValidationError("labels file " + path.string() + " has no labels");
    return LabelRegistry(std::move(labels));
}

std::optional<LabelIndex> LabelRegistry::find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

LabelIndex LabelRegistry::index_of(std::string_view label) const {
    if (auto i = find(label)) return *i;
    throw ValidationError("unknown label " + std::string(label));
}

bool Corpus::labeled() const {
    for (const auto& e : examples)
        if (!e.label) return false;
    return true;
}

std::vector<std::string> Corpus::ids() const {
    std::vector<std::string> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.id);
    return out;
}

std::vector<std::string> Corpus::texts() const {
    std::vector<std::string> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.text);
    return out;
}

std::vector<LabelIndex> Corpus::label_indices() const {
    std::vector<LabelIndex> out;
    out.reserve(examples.size());
    for (const auto& e : examples) {
        if (!e.label) throw ValidationError("example " + e.id + " has no label");
        out.push_back(*e.label);
    }
    return out;
}

Corpus load_corpus(const std::filesystem::path& path, const LabelRegistry& registry,
                   bool labeled) {
    auto lines = detail::read_lines(path);
    if (lines.empty()) throw ValidationError(path.string() + ": missing header");
    const std::vector<std::string> expected_header =
        labeled ? std::vector<std::string>{"id", "text", "label"}
                : std::vector<std::string>{"id", "text"};
    if (detail::split(lines[0], '\t') != expected_header)
        throw ValidationError(path.string() + ": bad header, expected " +
                              (labeled ? "id\\ttext\\tlabel" : "id\\ttext"));

    Corpus corpus;
    corpus.registry = registry;
    std::unordered_set<std::string> seen;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        const std::size_t line_no = n + 1;
        auto fields = detail::split(lines[n], '\t');
        if (fields.size() != expected_header.size())
            throw ValidationError("malformed row at line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(expected_header.size()) + " columns, got " +
                                  std::to_string(fields.size()));
        LabeledExample ex;
        ex.id = std::move(fields[0]);
        ex.text = std::move(fields[1]);
        if (ex.id.empty())
            throw ValidationError("empty id at line " + std::to_string(line_no));
        if (!seen.insert(ex.id).second)
            throw ValidationError("duplicate id " + ex.id + " at line " + std::to_string(line_no));
        if (labeled) {
            auto idx = registry.find(fields[2]);
            if (!idx)
                throw ValidationError("unknown label " + fields[2] + " at line " +
                                      std::to_string(line_no));
            ex.label = *idx;
        }
        corpus.examples.push_back(std::move(ex));
    }
    return corpus;
}

std::string sanitize_text(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    const bool labeled = corpus.labeled();
    std::ostringstream os;
    os << (labeled ? "id\ttext\tlabel\n" : "id\ttext\n");
    for (const auto& e : corpus.examples) {
        os << sanitize_text(e.id) << '\t' << sanitize_text(e.text);
        if (labeled) os << '\t' << corpus.registry.label(*e.label);
        os << '\n';
    }
    detail::write_file(path, os.str());
}

std::vector<std::size_t> corpus_stats(const Corpus& corpus) {
    std::vector<std::size_t> counts(corpus.registry.size(), 0);
    for (const auto& e : corpus.examples) {
        if (!e.label) throw ValidationError("corpus_stats requires a labeled corpus (" + e.id + ")");
        ++counts.at(*e.label);
    }
    return counts;
}

ProbabilityMatrix::ProbabilityMatrix(std::vector<std::string> ids, LabelRegistry registry,
                                     std::vector<double> values)
    : ids_(std::move(ids)), registry_(std::move(registry)), values_(std::move(values)) {
    const std::size_t k = registry_.size();
    if (k == 0) throw ValidationError("probability matrix needs a non-empty registry");
    if (values_.size() != ids_.size() * k)
        throw ValidationError("probability matrix shape mismatch: " + std::to_string(values_.size()) +
                              " values for " + std::to_string(ids_.size()) + "x" + std::to_string(k));
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!seen.insert(ids_[i]).second) throw ValidationError("duplicate id " + ids_[i]);
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double v = values_[i * k + c];
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw ValidationError("probability out of range in row " + ids_[i] + ": " +
                                      format_double(v));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance)
            throw ValidationError("row " + ids_[i] + " sums to " + format_double(sum) +
                                  ", expected 1");
    }
}

ProbabilityMatrix load_probability_matrix(const std::filesystem::path& path,
                                          const LabelRegistry& registry) {
    auto lines = detail::read_lines(path);
    if (lines.empty()) throw ValidationError(path.string() + ": missing header");
    auto header = detail::split(lines[0], ',');
    if (header.empty() || header[0] != "id")
        throw ValidationError(path.string() + ": header must start with 'id'");
    header.erase(header.begin());
    if (header != registry.labels())
        throw ValidationError(path.string() + ": header labels do not match the label registry");

    const std::size_t k = registry.size();
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        auto fields = detail::split(lines[n], ',');
        if (fields.size() != k + 1)
            throw ValidationError(path.string() + ": malformed row at line " + std::to_string(n + 1));
        ids.push_back(fields[0]);
        for (std::size_t c = 1; c <= k; ++c) {
            try {
                values.push_back(parse_double(fields[c]));
            } catch (const ValidationError& e) {
                throw ValidationError(path.string() + ": row " + fields[0] + ": " + e.what());
            }
        }
    }
    return ProbabilityMatrix(std::move(ids), registry, std::move(values));
}

void save_probability_matrix(const ProbabilityMatrix& m, const std::filesystem::path& path) {
    std::string out = "id";
    for (const auto& l : m.registry().labels()) out += "," + l;
    out += '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out += m.ids()[i];
        for (double v : m.row(i)) out += "," + format_double(v);
        out += '\n';
    }
    detail::write_file(path, out);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || first == last)
        throw ValidationError("not a number: '" + std::string(s) + "'");
    return v;
}

}  // namespace dialectid
