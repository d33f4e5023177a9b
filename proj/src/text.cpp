#include "dialectid/text.hpp"

#include "dialectid/error.hpp"

namespace dialectid::text {
namespace {

struct Scalar {
    char32_t value;
    std::size_t length;  // bytes consumed
};

Scalar decode_one(std::string_view s, std::size_t pos) {
    constexpr Scalar invalid{0xFFFD, 1};
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1};

    std::size_t len;
    char32_t cp;
    char32_t min;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4, cp = b0 & 0x07, min = 0x10000;
    } else {
        return invalid;
    }
    if (pos + len > s.size()) return invalid;
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return invalid;
        cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return invalid;
    return {cp, len};
}

bool is_unicode_space(char32_t c) {
    switch (c) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

// Byte offset of every scalar boundary, including the end of the string.
std::vector<std::size_t> boundaries(std::string_view s) {
    std::vector<std::size_t> out;
    out.reserve(s.size() + 1);
    std::size_t pos = 0;
    while (pos < s.size()) {
        out.push_back(pos);
        pos += decode_one(s, pos).length;
    }
    out.push_back(s.size());
    return out;
}

}  // namespace

TokenSequence tokenize(std::string_view text) {
    TokenSequence tokens;
    std::size_t pos = 0;
    std::size_t start = std::string_view::npos;
    while (pos < text.size()) {
        const auto sc = decode_one(text, pos);
        if (is_unicode_space(sc.value)) {
            if (start != std::string_view::npos) {
                tokens.emplace_back(text.substr(start, pos - start));
                start = std::string_view::npos;
            }
        } else if (start == std::string_view::npos) {
            start = pos;
        }
        pos += sc.length;
    }
    if (start != std::string_view::npos) tokens.emplace_back(text.substr(start));
    return tokens;
}

std::string join(const TokenSequence& tokens, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += sep;
        out += tokens[i];
    }
    return out;
}

std::string duplicate_words(const TokenSequence& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
        out += ' ';
        out += tokens[i];
    }
    return out;
}

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    for (std::size_t pos = 0; pos < s.size();) {
        const auto sc = decode_one(s, pos);
        out.push_back(sc.value);
        pos += sc.length;
    }
    return out;
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) {
        if (c < 0x80) {
            out += static_cast<char>(c);
        } else if (c < 0x800) {
            out += static_cast<char>(0xC0 | (c >> 6));
            out += static_cast<char>(0x80 | (c & 0x3F));
        } else if (c < 0x10000) {
            out += static_cast<char>(0xE0 | (c >> 12));
            out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (c & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (c >> 18));
            out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (c & 0x3F));
        }
    }
    return out;
}

std::size_t scalar_count(std::string_view s) { return boundaries(s).size() - 1; }

std::vector<std::string> char_ngrams(std::string_view text, std::size_t n) {
    if (n == 0) throw ValidationError("char_ngrams: n must be >= 1");
    const auto b = boundaries(text);
    const std::size_t count = b.size() - 1;
    std::vector<std::string> out;
    if (count < n) return out;
    out.reserve(count - n + 1);
    for (std::size_t i = 0; i + n <= count; ++i)
        out.emplace_back(text.substr(b[i], b[i + n] - b[i]));
    return out;
}

std::vector<std::string> char_ngram_range(std::string_view text, std::size_t lo, std::size_t hi) {
    if (lo == 0) throw ValidationError("char_ngram_range: lo must be >= 1");
    if (lo > hi) throw ValidationError("char_ngram_range: lo > hi");
    std::vector<std::string> out;
    for (std::size_t n = lo; n <= hi; ++n) {
        auto grams = char_ngrams(text, n);
        out.insert(out.end(), std::make_move_iterator(grams.begin()),
                   std::make_move_iterator(grams.end()));
    }
    return out;
}

std::vector<std::string> word_ngrams(const TokenSequence& tokens, std::size_t n) {
    if (n == 0) throw ValidationError("word_ngrams: n must be >= 1");
    std::vector<std::string> out;
    if (tokens.size() < n) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
            gram += ' ';
            gram += tokens[i + j];
        }
        out.push_back(std::move(gram));
    }
    return out;
}

}  // namespace dialectid::text
