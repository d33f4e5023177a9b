#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "dialectid/error.hpp"
#include "dialectid/features.hpp"
#include "support.hpp"

using namespace dialectid;
using namespace dialectid::features;
using doctest::Approx;

namespace {

// Dense reimplementation of the weighting: count * (ln((1+N)/(1+df)) + 1), then L2.
std::map<std::string, double> dense_tfidf(const std::vector<Document>& corpus, const Document& doc,
                                          std::size_t min_df) {
    std::map<std::string, std::size_t> df;
    for (const auto& d : corpus) {
        std::vector<std::string> seen(d);
        std::sort(seen.begin(), seen.end());
        seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
        for (const auto& t : seen) ++df[t];
    }
    const double N = static_cast<double>(corpus.size());
    std::map<std::string, double> w;
    for (const auto& t : doc) {
        auto it = df.find(t);
        if (it == df.end() || it->second < min_df) continue;
        w[t] += std::log((1.0 + N) / (1.0 + static_cast<double>(it->second))) + 1.0;
    }
    double norm = 0.0;
    for (const auto& [t, v] : w) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0)
        for (auto& [t, v] : w) v /= norm;
    return w;
}

Document random_doc(testing::Gen& g) {
    static const std::vector<std::string> terms{"a", "b", "c", "d", "e", "ff", "gg", "م"};
    Document d;
    const auto n = g.between(0, 7);
    for (std::size_t i = 0; i < n; ++i) d.push_back(terms[g.index(terms.size())]);
    return d;
}

}  // namespace

TEST_CASE("fit_vocabulary") {
    const std::vector<Document> docs{{"a", "b"}, {"a"}};
    auto v = fit_vocabulary(docs, 1);
    REQUIRE(v.size() == 2);
    CHECK(v.find("a") == 0u);
    CHECK(v.find("b") == 1u);
    CHECK(v.df(0) == 2);
    CHECK(v.df(1) == 1);

    auto v2 = fit_vocabulary(docs, 2);
    CHECK(v2.size() == 1);
    CHECK(v2.find("a") == 0u);

    const std::vector<Document> empty_doc{{}};
    auto v3 = fit_vocabulary(empty_doc, 1);
    CHECK(v3.size() == 0);
    CHECK(v3.n_documents() == 1);

    CHECK_THROWS_AS(fit_vocabulary(std::vector<Document>{}, 1), ValidationError);
    CHECK_THROWS_AS(fit_vocabulary(docs, 0), ValidationError);
}

TEST_CASE("tfidf_transform hand values") {
    const std::vector<Document> docs{{"a", "b"}, {"a"}};
    auto v = fit_vocabulary(docs, 1);
    CHECK(v.idf(0) == Approx(1.0).epsilon(1e-15));
    CHECK(v.idf(1) == Approx(std::log(1.5) + 1.0).epsilon(1e-15));
    auto x = tfidf_transform(docs[0], v);
    REQUIRE(x.nnz() == 2);
    const double ia = 1.0, ib = std::log(1.5) + 1.0, n = std::sqrt(ia * ia + ib * ib);
    CHECK(x.entries()[0].value == Approx(ia / n).epsilon(1e-12));
    CHECK(x.entries()[1].value == Approx(ib / n).epsilon(1e-12));
    CHECK(x.entries()[0].value == Approx(0.5797).epsilon(1e-4));
    CHECK(x.entries()[1].value == Approx(0.8148).epsilon(1e-4));

    CHECK(tfidf_transform({"zz", "yy"}, v).empty());

    const std::vector<Document> one{{"a"}};
    auto v1 = fit_vocabulary(one, 1);
    auto y = tfidf_transform({"a", "a"}, v1);
    REQUIRE(y.nnz() == 1);
    CHECK(y.entries()[0].value == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("property: tfidf agrees with a dense oracle and is unit length") {
    testing::Gen g(31);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Document> docs;
        const auto n = g.between(1, 6);
        for (std::size_t i = 0; i < n; ++i) docs.push_back(random_doc(g));
        const std::size_t min_df = g.between(1, 2);
        auto v = fit_vocabulary(docs, min_df);
        for (std::size_t i = 0; i < v.size(); ++i) {
            CHECK(v.df(i) >= 1);
            CHECK(v.df(i) <= v.n_documents());
            if (i) CHECK(v.term(i - 1) < v.term(i));
        }
        const auto query = g.coin() ? docs[g.index(docs.size())] : random_doc(g);
        const auto x = tfidf_transform(query, v);
        const auto oracle = dense_tfidf(docs, query, min_df);
        CHECK(x.nnz() == oracle.size());
        for (const auto& e : x.entries()) CHECK(std::fabs(e.value - oracle.at(v.term(e.index))) < 1e-12);
        const double norm = x.norm();
        CHECK((norm == 0.0 || std::fabs(norm - 1.0) < 1e-9));
    }
}

TEST_CASE("sparse vector invariants") {
    SparseVector v(5, {{1, 2.0}, {3, 0.0}, {4, -1.0}});
    CHECK(v.nnz() == 2);
    CHECK(v.to_dense() == std::vector<double>{0, 2, 0, 0, -1});
    CHECK_THROWS_AS(SparseVector(3, {{2, 1.0}, {1, 1.0}}), ValidationError);
    CHECK_THROWS_AS(SparseVector(3, {{1, 1.0}, {1, 1.0}}), ValidationError);
    CHECK_THROWS_AS(SparseVector(3, {{3, 1.0}}), ValidationError);
    CHECK(SparseVector::from_dense(std::vector<double>{0, 0.5, 0}) == SparseVector(3, {{1, 0.5}}));
}

TEST_CASE("concat_features") {
    std::vector<SparseVector> parts{SparseVector(2, {{0, 1.0}}), SparseVector(3, {{1, 5.0}})};
    CHECK(concat_features(parts) == SparseVector(5, {{0, 1.0}, {3, 5.0}}));
    std::vector<SparseVector> empties{SparseVector(2), SparseVector(4)};
    auto e = concat_features(empties);
    CHECK(e.dimension() == 6);
    CHECK(e.empty());
    std::vector<SparseVector> single{SparseVector(3, {{2, 7.0}})};
    CHECK(concat_features(single) == single[0]);
}

TEST_CASE("property: concat is associative") {
    testing::Gen g(32);
    auto rnd = [&] {
        std::vector<double> d(g.between(0, 5));
        for (auto& x : d) x = g.coin() ? g.real(-1, 1) : 0.0;
        return SparseVector::from_dense(d);
    };
    for (int i = 0; i < 200; ++i) {
        auto a = rnd(), b = rnd(), c = rnd();
        std::vector<SparseVector> bc{b, c}, ab{a, b};
        std::vector<SparseVector> left{a, concat_features(bc)}, right{concat_features(ab), c};
        CHECK(concat_features(left) == concat_features(right));
    }
}

TEST_CASE("stack_probability_features") {
    const LabelRegistry reg({"A", "B"});
    std::vector<ProbabilityMatrix> mats{ProbabilityMatrix({"t1"}, reg, {0.6, 0.4})};
    const std::vector<std::string> ids{"t1"};
    const std::vector<SparseVector> tfidf{SparseVector(0)};
    auto out = stack_probability_features(mats, ids, tfidf);
    REQUIRE(out.size() == 1);
    CHECK(out[0] == SparseVector(2, {{0, 0.6}, {1, 0.4}}));

    SUBCASE("width is K per matrix plus tfidf width") {
        testing::Gen g(33);
        std::vector<std::string> labels;
        for (int c = 0; c < 21; ++c) labels.push_back("C" + std::to_string(c));
        const LabelRegistry r21(labels);
        for (int trial = 0; trial < 20; ++trial) {
            const auto n = g.between(1, 4), n_mats = g.between(1, 4), W = g.between(0, 30);
            std::vector<std::string> rid;
            for (std::size_t i = 0; i < n; ++i) rid.push_back("r" + std::to_string(i));
            std::vector<ProbabilityMatrix> ms;
            for (std::size_t m = 0; m < n_mats; ++m) {
                std::vector<double> vals;
                for (std::size_t i = 0; i < n; ++i) {
                    auto row = g.simplex(21);
                    vals.insert(vals.end(), row.begin(), row.end());
                }
                ms.emplace_back(rid, r21, vals);
            }
            std::vector<SparseVector> tf(n, SparseVector(W));
            for (const auto& x : stack_probability_features(ms, rid, tf)) CHECK(x.dimension() == 21 * n_mats + W);
        }
    }
    SUBCASE("permuted ids are rejected") {
        std::vector<ProbabilityMatrix> two{ProbabilityMatrix({"t1", "t2"}, reg, {1, 0, 0, 1}),
                                           ProbabilityMatrix({"t2", "t1"}, reg, {1, 0, 0, 1})};
        const std::vector<std::string> tid{"t1", "t2"};
        const std::vector<SparseVector> tv{SparseVector(0), SparseVector(0)};
        CHECK_THROWS_AS(stack_probability_features(two, tid, tv), ValidationError);
        const std::vector<std::string> swapped{"t2", "t1"};
        std::vector<ProbabilityMatrix> first{two[0]};
        CHECK_THROWS_AS(stack_probability_features(first, swapped, tv), ValidationError);
    }
}

TEST_CASE("analyzers and vectorizer") {
    CHECK(Analyzer::words()("a b  a") == Document{"a", "b", "a"});
    CHECK(Analyzer::words(1, 2)("a b") == Document{"a", "b", "a b"});
    CHECK(Analyzer::chars(2, 2)("ab c") == Document{"ab", "b ", " c"});
    CHECK(Analyzer::chars(3, 3, true)("ab") == Document{"ab ", "b a", " ab"});

    const std::vector<std::string> texts{"a b", "a"};
    auto tv = TextVectorizer::fit(texts, Analyzer::words(), 1, Weighting::tfidf);
    CHECK(tv.dimension() == 2);
    CHECK(tv.transform("a b") == tfidf_transform({"a", "b"}, tv.vocabulary()));
    auto cv = TextVectorizer::fit(texts, Analyzer::words(), 1, Weighting::counts);
    CHECK(cv.transform("a a b") == SparseVector(2, {{0, 2.0}, {1, 1.0}}));

    BinaryWriter w;
    tv.write(w);
    const auto bytes = w.take();
    BinaryReader r(bytes);
    auto back = TextVectorizer::read(r);
    CHECK(back.transform("b a q") == tv.transform("b a q"));
}

TEST_CASE("load_embeddings") {
    testing::TempDir dir("emb");
    testing::write_text(dir / "e.txt", "a 1 0\nb 0 1\n");
    auto t = load_embeddings(dir / "e.txt");
    CHECK(t.dimension() == 2);
    CHECK(t.size() == 2);
    CHECK(*t.find("b") == std::vector<double>{0, 1});

    testing::write_text(dir / "h.txt", "2 2\na 1 0\nb 0 1\n");
    CHECK(load_embeddings(dir / "h.txt").size() == 2);

    testing::write_text(dir / "bad.txt", "a 1 0\nb 0 1\nc 1 2 3\n");
    try {
        load_embeddings(dir / "bad.txt");
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    testing::write_text(dir / "empty.txt", "");
    CHECK_THROWS_AS(load_embeddings(dir / "empty.txt"), ValidationError);
}

TEST_CASE("pool_embedding") {
    EmbeddingTable t(2);
    t.add("a", {1, 0});
    t.add("b", {0, 1});
    CHECK(pool_embedding({"a", "b"}, t) == std::vector<double>{0.5, 0.5});
    auto p = pool_embedding({"a", "a", "b"}, t);
    CHECK(p[0] == Approx(2.0 / 3.0));
    CHECK(p[1] == Approx(1.0 / 3.0));
    CHECK(pool_embedding({"x", "y"}, t) == std::vector<double>{0, 0});
    CHECK(pool_embedding({"a", "x"}, t) == std::vector<double>{1, 0});
    CHECK_THROWS_AS(t.add("c", {1, 2, 3}), ValidationError);
}

TEST_CASE("property: pooling is permutation invariant") {
    testing::Gen g(34);
    EmbeddingTable t(3);
    const std::vector<std::string> words{"a", "b", "c", "d"};
    for (const auto& w : words) t.add(w, {g.real(-1, 1), g.real(-1, 1), g.real(-1, 1)});
    for (int i = 0; i < 200; ++i) {
        text::TokenSequence toks;
        for (std::size_t k = g.between(0, 8); k > 0; --k) toks.push_back(g.coin(0.8) ? words[g.index(4)] : "oov");
        auto shuffled = toks;
        std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
        const auto a = pool_embedding(toks, t), b = pool_embedding(shuffled, t);
        for (std::size_t d = 0; d < 3; ++d) CHECK(a[d] == Approx(b[d]).epsilon(1e-12));
    }
}
