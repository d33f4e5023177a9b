#include "dialectid/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include <zlib.h>

#include "dialectid/error.hpp"
#include "io_util.hpp"

namespace dialectid {
namespace {

constexpr std::string_view kMagic = "dialectid-model";

std::uint32_t crc32_of(std::string_view data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    // zlib takes uInt lengths; feed in chunks.
    std::size_t pos = 0;
    while (pos < data.size()) {
        const std::size_t n = std::min<std::size_t>(data.size() - pos, 1u << 30);
        crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data() + pos), static_cast<uInt>(n));
        pos += n;
    }
    return static_cast<std::uint32_t>(crc);
}

std::string hex32(std::uint32_t v) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", v);
    return buf;
}

// Cursor over the header's LF-terminated lines.
class HeaderReader {
public:
    explicit HeaderReader(std::string_view data) : data_(data) {}

    std::string_view line() {
        const auto end = data_.find('\n', pos_);
        if (end == std::string_view::npos) throw ValidationError("model file: truncated header");
        auto l = data_.substr(pos_, end - pos_);
        pos_ = end + 1;
        return l;
    }
    std::string_view field(std::string_view key) {
        auto l = line();
        if (l.size() <= key.size() || l.substr(0, key.size()) != key || l[key.size()] != ' ')
            throw ValidationError("model file: expected '" + std::string(key) + "' field");
        return l.substr(key.size() + 1);
    }
    std::string_view rest() const { return data_.substr(pos_); }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

std::uint64_t parse_u64(std::string_view s, std::string_view what) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
        throw ValidationError("model file: bad " + std::string(what) + " '" + std::string(s) + "'");
    return v;
}

}  // namespace

const std::vector<std::string>& known_model_kinds() {
    static const std::vector<std::string> kinds{
        "bnb", "charlm", "dummy", "embed_logreg", "embed_mlp", "just",
        "knn", "logreg", "mawdoo3", "mnb", "safina", "svm",
    };
    return kinds;
}

bool is_known_model_kind(std::string_view kind) {
    const auto& k = known_model_kinds();
    return std::find(k.begin(), k.end(), kind) != k.end();
}

std::string serialize_model(const ModelContainer& m) {
    if (!is_known_model_kind(m.model_kind))
        throw ValidationError("unknown model kind " + m.model_kind);
    std::string out(kMagic);
    out += "\nformat_version " + std::to_string(m.format_version);
    out += "\nmodel_kind " + m.model_kind;
    out += "\nhyperparameters " + std::to_string(m.hyperparameters.size());
    for (const auto& [k, v] : m.hyperparameters) {
        if (k.empty() || k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
            throw ValidationError("hyperparameter '" + k + "' cannot be serialized");
        out += "\n" + k + "=" + v;
    }
    out += "\npayload_bytes " + std::to_string(m.payload.size());
    out += "\nchecksum crc32:" + hex32(crc32_of(m.payload));
    out += "\n\n";
    out += m.payload;
    return out;
}

ModelContainer parse_model(std::string_view bytes) {
    HeaderReader h(bytes);
    if (h.line() != kMagic) throw ValidationError("not a dialectid model file");
    ModelContainer m;
    const auto version = parse_u64(h.field("format_version"), "format_version");
    if (version != ModelContainer::kFormatVersion)
        throw ValidationError("unsupported model format_version " + std::to_string(version) +
                              " (expected " + std::to_string(ModelContainer::kFormatVersion) + ")");
    m.format_version = static_cast<std::uint32_t>(version);
    m.model_kind = std::string(h.field("model_kind"));
    if (!is_known_model_kind(m.model_kind))
        throw ValidationError("unknown model kind " + m.model_kind);
    const auto n_hp = parse_u64(h.field("hyperparameters"), "hyperparameter count");
    for (std::uint64_t i = 0; i < n_hp; ++i) {
        auto l = h.line();
        const auto eq = l.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ValidationError("model file: malformed hyperparameter line");
        m.hyperparameters.emplace(std::string(l.substr(0, eq)), std::string(l.substr(eq + 1)));
    }
    const auto size = parse_u64(h.field("payload_bytes"), "payload size");
    auto checksum = h.field("checksum");
    if (checksum.substr(0, 6) != "crc32:") throw ValidationError("model file: unsupported checksum");
    if (!h.line().empty()) throw ValidationError("model file: missing header terminator");

    const auto payload = h.rest();
    if (payload.size() != size || hex32(crc32_of(payload)) != checksum.substr(6))
        throw ChecksumError("model payload checksum mismatch (expected " + std::to_string(size) +
                            " bytes, found " + std::to_string(payload.size()) + ")");
    m.payload = std::string(payload);
    return m;
}

void save_model(const ModelContainer& m, const std::filesystem::path& path) {
    detail::write_file(path, serialize_model(m));
}

ModelContainer load_model(const std::filesystem::path& path) {
    return parse_model(detail::read_file(path));
}

}  // namespace dialectid
