#include "doctest.h"

#include "dialectid/error.hpp"
#include "dialectid/text.hpp"
#include "support.hpp"

using namespace dialectid;
using namespace dialectid::text;
using Strings = std::vector<std::string>;

TEST_CASE("tokenize") {
    CHECK(tokenize("مرحبا يا عالم") == Strings{"مرحبا", "يا", "عالم"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("a  b") == Strings{"a", "b"});
    CHECK(tokenize("\ta b　c  ") == Strings{"a", "b", "c"});
    CHECK(tokenize("   ").empty());
}

TEST_CASE("duplicate_words") {
    CHECK(duplicate_words({"x", "y"}) == "x x y y");
    CHECK(duplicate_words({}) == "");
    CHECK(duplicate_words({"a"}) == "a a");
}

TEST_CASE("char_ngrams") {
    CHECK(char_ngrams("abc", 2) == Strings{"ab", "bc"});
    CHECK(char_ngrams("abc", 1) == Strings{"a", "b", "c"});
    CHECK(char_ngrams("ab", 3).empty());
    CHECK_THROWS_AS(char_ngrams("abc", 0), ValidationError);
    CHECK(char_ngrams("مرح", 2) == Strings{"مر", "رح"});
}

TEST_CASE("char_ngram_range") {
    CHECK(char_ngram_range("abc", 1, 2) == Strings{"a", "b", "c", "ab", "bc"});
    CHECK(char_ngram_range("a", 2, 3).empty());
    CHECK(char_ngram_range("abcd", 4, 6) == Strings{"abcd"});
    CHECK_THROWS_AS(char_ngram_range("abc", 3, 2), ValidationError);
    CHECK_THROWS_AS(char_ngram_range("abc", 0, 2), ValidationError);
}

TEST_CASE("word_ngrams") {
    CHECK(word_ngrams({"a", "b", "c"}, 2) == Strings{"a b", "b c"});
    CHECK(word_ngrams({"a"}, 1) == Strings{"a"});
    CHECK(word_ngrams({"a"}, 2).empty());
    CHECK_THROWS_AS(word_ngrams({"a"}, 0), ValidationError);
}

TEST_CASE("utf8 decoding") {
    CHECK(decode_utf8("a\xd9\x85") == std::u32string{U'a', U'م'});
    CHECK(decode_utf8("\xff" "a") == std::u32string{0xFFFD, U'a'});
    CHECK(encode_utf8(decode_utf8("\xf0\x9f\x98\x80z")) == "\xf0\x9f\x98\x80z");
    CHECK(scalar_count("مرحبا") == 5);
}

TEST_CASE("property: n-gram counts follow scalar length") {
    testing::Gen g(21);
    for (int i = 0; i < 300; ++i) {
        const auto s = g.text();
        const auto len = scalar_count(s);
        for (std::size_t n = 1; n <= 6; ++n) {
            const auto grams = char_ngrams(s, n);
            CHECK(grams.size() == (len >= n ? len - n + 1 : 0));
            for (const auto& gram : grams) CHECK(scalar_count(gram) == n);
        }
    }
}

TEST_CASE("property: duplication doubles tokens and is reversible") {
    testing::Gen g(22);
    for (int i = 0; i < 300; ++i) {
        const auto tokens = tokenize(g.text());
        const auto doubled = tokenize(duplicate_words(tokens));
        REQUIRE(doubled.size() == 2 * tokens.size());
        TokenSequence recovered;
        for (std::size_t k = 0; k < doubled.size(); k += 2) {
            CHECK(doubled[k] == doubled[k + 1]);
            recovered.push_back(doubled[k]);
        }
        CHECK(recovered == tokens);
    }
}

TEST_CASE("property: tokenize is idempotent through join") {
    testing::Gen g(23);
    for (int i = 0; i < 300; ++i) {
        const auto tokens = tokenize(g.text());
        CHECK(tokenize(join(tokens)) == tokens);
        for (const auto& t : tokens) {
            CHECK_FALSE(t.empty());
            CHECK(tokenize(t).size() == 1);
        }
    }
}
