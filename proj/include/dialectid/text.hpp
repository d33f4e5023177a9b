#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dialectid::text {

/// Non-empty, whitespace-free tokens in text order.
using TokenSequence = std::vector<std::string>;

/// Splits on runs of Unicode whitespace (White_Space property). No other
/// normalization is applied.
TokenSequence tokenize(std::string_view text);

std::string join(const TokenSequence& tokens, std::string_view sep = " ");

/// "x y" -> "x x y y"
std::string duplicate_words(const TokenSequence& tokens);

/// Decodes UTF-8 into scalar values. An invalid byte decodes to U+FFFD and
/// consumes exactly one byte.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::size_t scalar_count(std::string_view s);

/// All contiguous n-scalar substrings, in order. Strings shorter than n
/// yield nothing. Throws ValidationError for n == 0.
std::vector<std::string> char_ngrams(std::string_view text, std::size_t n);

/// char_ngrams for n = lo, lo+1, ..., hi, concatenated.
std::vector<std::string> char_ngram_range(std::string_view text, std::size_t lo, std::size_t hi);

/// Contiguous n-token windows joined by a single space.
std::vector<std::string> word_ngrams(const TokenSequence& tokens, std::size_t n);

}  // namespace dialectid::text
