#include "doctest.h"

#include <algorithm>
#include <map>

#include "dialectid/augmentation.hpp"
#include "dialectid/error.hpp"
#include "dialectid/text.hpp"
#include "support.hpp"

using namespace dialectid;
using augmentation::balance_by_shuffle;

namespace {

std::vector<std::string> sorted_tokens(const std::string& s) {
    auto t = text::tokenize(s);
    std::sort(t.begin(), t.end());
    return t;
}

std::string source_id(const std::string& id) { return id.substr(0, id.rfind("#aug")); }

}  // namespace

TEST_CASE("balance {A:3, B:1}") {
    const LabelRegistry reg({"A", "B"});
    Corpus c{{{"a1", "x y", 0}, {"a2", "y", 0}, {"a3", "z", 0}, {"b1", "p q r", 1}}, reg};
    auto out = balance_by_shuffle(c, {.seed = 1});
    CHECK(corpus_stats(out) == std::vector<std::size_t>{3, 3});
    REQUIRE(out.size() == 6);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out.examples[i].id == c.examples[i].id);
    for (std::size_t i = 4; i < 6; ++i) {
        CHECK(out.examples[i].label == 1u);
        CHECK(source_id(out.examples[i].id) == "b1");
        CHECK(sorted_tokens(out.examples[i].text) == sorted_tokens("p q r"));
    }
    CHECK(out.examples[4].id != out.examples[5].id);
}

TEST_CASE("balanced input is returned unchanged") {
    const LabelRegistry reg({"A", "B"});
    Corpus c{{{"a", "x y", 0}, {"b", "p", 1}}, reg};
    auto out = balance_by_shuffle(c, {.seed = 5});
    REQUIRE(out.size() == 2);
    CHECK(out.examples[0].text == "x y");
    CHECK(out.examples[1].id == "b");
}

TEST_CASE("single-token source is copied verbatim") {
    const LabelRegistry reg({"A", "B"});
    Corpus c{{{"a1", "x", 0}, {"a2", "y", 0}, {"b", "مرحبا", 1}}, reg};
    auto out = balance_by_shuffle(c, {.seed = 2});
    CHECK(out.examples.back().text == "مرحبا");
}

TEST_CASE("errors") {
    const LabelRegistry reg({"A", "B"});
    Corpus c{{{"a", "x", 0}}, reg};
    CHECK_THROWS_AS(balance_by_shuffle(c, {}), ValidationError);
    Corpus d{{{"a", "x", 0}, {"a2", "y", 0}, {"b", "z", 1}}, reg};
    CHECK_THROWS_AS(balance_by_shuffle(d, {.seed = 0, .target = 1}), ValidationError);
    CHECK(balance_by_shuffle(d, {.seed = 0, .target = 4}).size() == 8);
}

TEST_CASE("property: balance contract") {
    testing::Gen g(71);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t K = g.between(1, 4);
        std::vector<std::string> labels;
        for (std::size_t k = 0; k < K; ++k) labels.push_back("L" + std::to_string(k));
        Corpus c{{}, LabelRegistry(labels)};
        std::size_t n = 0;
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t m = g.between(1, 6); m > 0; --m)
                c.examples.push_back({"e" + std::to_string(n++), g.text(5), k});
        std::shuffle(c.examples.begin(), c.examples.end(), g.engine());

        const std::uint64_t seed = g.engine()();
        auto out = balance_by_shuffle(c, {.seed = seed});
        const auto counts = corpus_stats(out);
        CHECK(std::all_of(counts.begin(), counts.end(), [&](std::size_t v) { return v == counts[0]; }));
        CHECK(out.size() == K * counts[0]);

        std::map<std::string, const LabeledExample*> by_id;
        for (const auto& e : c.examples) by_id[e.id] = &e;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto& e = out.examples[i];
            if (i < c.size()) {
                CHECK(e.id == c.examples[i].id);
                CHECK(e.text == c.examples[i].text);
                continue;
            }
            const auto* src = by_id.at(source_id(e.id));
            CHECK(src->label == e.label);
            CHECK(sorted_tokens(src->text) == sorted_tokens(e.text));
        }

        auto again = balance_by_shuffle(c, {.seed = seed});
        REQUIRE(again.size() == out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            CHECK(again.examples[i].id == out.examples[i].id);
            CHECK(again.examples[i].text == out.examples[i].text);
        }
    }
}
