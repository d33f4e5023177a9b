#include "doctest.h"

#include <algorithm>
#include <set>

#include "dialectid/error.hpp"
#include "dialectid/pipelines.hpp"
#include "dialectid/text.hpp"
#include "support.hpp"

using namespace dialectid;
using namespace dialectid::ensembles;

namespace {

const LabelRegistry kAB({"A", "B"});

ProbabilityMatrix matrix(std::vector<std::string> ids, std::vector<double> v, const LabelRegistry& r = kAB) {
    return ProbabilityMatrix(std::move(ids), r, std::move(v));
}

ProbabilityMatrix random_matrix(testing::Gen& g, std::size_t rows, const LabelRegistry& reg) {
    std::vector<std::string> ids;
    std::vector<double> vals;
    for (std::size_t i = 0; i < rows; ++i) {
        ids.push_back("r" + std::to_string(i));
        auto row = g.simplex(reg.size());
        vals.insert(vals.end(), row.begin(), row.end());
    }
    return ProbabilityMatrix(ids, reg, vals);
}

Predictions preds(std::vector<std::string> ids, std::vector<LabelIndex> labels, const LabelRegistry& r = kAB) {
    Predictions p;
    p.ids = std::move(ids);
    p.labels = std::move(labels);
    p.registry = r;
    return p;
}

}  // namespace

TEST_CASE("soft_vote") {
    std::vector<ProbabilityMatrix> two{matrix({"t"}, {0.6, 0.4}), matrix({"t"}, {0.2, 0.8})};
    auto m = soft_vote(two);
    CHECK(m.at(0, 0) == (0.6 + 0.2) / 2);
    CHECK(m.at(0, 1) == (0.4 + 0.8) / 2);
    CHECK(argmax_labels(m).labels[0] == 1);

    SUBCASE("mismatches") {
        std::vector<ProbabilityMatrix> ids{matrix({"t"}, {1, 0}), matrix({"u"}, {1, 0})};
        CHECK_THROWS_AS(soft_vote(ids), ValidationError);
        std::vector<ProbabilityMatrix> labels{matrix({"t"}, {1, 0}), matrix({"t"}, {1, 0}, LabelRegistry({"B", "A"}))};
        CHECK_THROWS_AS(soft_vote(labels), ValidationError);
        CHECK_THROWS_AS(soft_vote({}), ValidationError);
    }
}

TEST_CASE("property: soft_vote closure, identity and permutation invariance") {
    testing::Gen g(61);
    const LabelRegistry reg({"A", "B", "C", "D"});
    for (int trial = 0; trial < 200; ++trial) {
        const auto rows = g.between(1, 10);
        const auto one = random_matrix(g, rows, reg);
        std::vector<ProbabilityMatrix> copies(g.between(1, 7), one);
        CHECK(soft_vote(copies).values() == one.values());

        std::vector<ProbabilityMatrix> mats;
        for (std::size_t n = g.between(1, 5); n > 0; --n) mats.push_back(random_matrix(g, rows, reg));
        const auto avg = soft_vote(mats);  // constructor re-validates the rows
        std::reverse(mats.begin(), mats.end());
        const auto rev = soft_vote(mats);
        for (std::size_t i = 0; i < avg.values().size(); ++i)
            CHECK(std::fabs(avg.values()[i] - rev.values()[i]) < 1e-15);
    }
}

TEST_CASE("hard_vote") {
    using Sets = std::vector<std::vector<LabelIndex>>;
    CHECK(hard_vote(Sets{{0}, {0}, {1}}, 2) == std::vector<LabelIndex>{0});
    CHECK(hard_vote(Sets{{0}, {1}}, 2) == std::vector<LabelIndex>{0});
    CHECK(hard_vote(Sets{{1}, {0}}, 2) == std::vector<LabelIndex>{0});
    CHECK(hard_vote(Sets{{1, 0, 1}}, 2) == std::vector<LabelIndex>{1, 0, 1});
    CHECK_THROWS_AS(hard_vote(Sets{{0}, {0, 1}}, 2), ValidationError);
    CHECK_THROWS_AS(hard_vote(Sets{}, 2), ValidationError);

    SUBCASE("prediction sets carry vote shares") {
        std::vector<Predictions> v{preds({"x", "y"}, {0, 1}), preds({"x", "y"}, {1, 1}), preds({"x", "y"}, {0, 1})};
        auto out = hard_vote(v);
        CHECK(out.labels == std::vector<LabelIndex>{0, 1});
        REQUIRE(out.probabilities);
        CHECK(out.probabilities->at(0, 0) == doctest::Approx(2.0 / 3.0));
        CHECK(out.probabilities->at(1, 1) == doctest::Approx(1.0));
        std::vector<Predictions> bad{preds({"x"}, {0}), preds({"z"}, {0})};
        CHECK_THROWS_AS(hard_vote(bad), ValidationError);
    }
}

TEST_CASE("property: hard_vote agrees with an unambiguous majority") {
    testing::Gen g(62);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t K = g.between(2, 5), voters = 2 * g.between(0, 3) + 1;
        const LabelIndex winner = g.index(K);
        std::vector<std::vector<LabelIndex>> sets(voters, std::vector<LabelIndex>(1));
        // Strict majority for the winner; the rest are arbitrary.
        const std::size_t need = voters / 2 + 1;
        for (std::size_t v = 0; v < voters; ++v) sets[v][0] = v < need ? winner : g.index(K);
        std::shuffle(sets.begin(), sets.end(), g.engine());
        CHECK(hard_vote(sets, K)[0] == winner);
    }
}

TEST_CASE("argmax_labels") {
    auto p = argmax_labels(matrix({"a", "b"}, {0.4, 0.6, 0.5, 0.5}));
    CHECK(p.labels == std::vector<LabelIndex>{1, 0});
    CHECK(p.probabilities->values() == std::vector<double>{0.4, 0.6, 0.5, 0.5});
}

TEST_CASE("predictions TSV") {
    testing::TempDir dir("preds");
    auto p = preds({"x", "y"}, {1, 0});
    save_predictions(p, dir / "p.tsv");
    CHECK(testing::read_text(dir / "p.tsv") == "id\tlabel\nx\tB\ny\tA\n");
    auto back = load_predictions(dir / "p.tsv", kAB);
    CHECK(back.ids == p.ids);
    CHECK(back.labels == p.labels);
    testing::write_text(dir / "bad.tsv", "id\tlabel\nx\tZ\n");
    CHECK_THROWS_AS(load_predictions(dir / "bad.tsv", kAB), ValidationError);
}

TEST_CASE("lexicon rules") {
    const LabelRegistry reg({"EG", "SD", "BH"});
    Corpus corpus{{{"t1", "والله يازول كيفك", 0}, {"t2", "يازولك", 0}, {"t3", "ماشي", 0}}, reg};
    auto base = preds({"t1", "t2", "t3"}, {0, 0, 2}, reg);

    std::vector<LexiconRule> rules{{"يازول", 1, 10}};
    auto out = apply_lexicon_rules(base, rules, corpus);
    CHECK(out.labels == std::vector<LabelIndex>{1, 0, 2});  // no substring match in t2

    CHECK(apply_lexicon_rules(base, {}, corpus).labels == base.labels);

    SUBCASE("higher priority wins whatever the order") {
        std::vector<LexiconRule> two{{"كيفك", 2, 5}, {"والله", 1, 7}};
        CHECK(apply_lexicon_rules(base, two, corpus).labels[0] == 1);
        std::reverse(two.begin(), two.end());
        CHECK(apply_lexicon_rules(base, two, corpus).labels[0] == 1);
    }
    SUBCASE("probability rows are kept") {
        base.probabilities = ProbabilityMatrix(base.ids, reg, {1, 0, 0, 1, 0, 0, 0, 0, 1});
        auto kept = apply_lexicon_rules(base, rules, corpus);
        CHECK(kept.probabilities->values() == base.probabilities->values());
    }
    SUBCASE("rules file") {
        testing::TempDir dir("rules");
        testing::write_text(dir / "r.tsv", "يازول\tSD\t10\n\nكيفك\tBH\t3\n");
        auto loaded = load_lexicon_rules(dir / "r.tsv", reg);
        REQUIRE(loaded.size() == 2);
        CHECK(loaded[0].token == "يازول");
        CHECK(loaded[1].label == 2);
        testing::write_text(dir / "dup.tsv", "a\tSD\t1\nb\tEG\t1\n");
        CHECK_THROWS_AS(load_lexicon_rules(dir / "dup.tsv", reg), ValidationError);
        testing::write_text(dir / "lab.tsv", "a\tXX\t1\n");
        CHECK_THROWS_AS(load_lexicon_rules(dir / "lab.tsv", reg), ValidationError);
    }
}

TEST_CASE("property: apply_lexicon_rules is idempotent") {
    testing::Gen g(63);
    const LabelRegistry reg({"A", "B", "C"});
    for (int trial = 0; trial < 100; ++trial) {
        Corpus c{{}, reg};
        Predictions p = preds({}, {}, reg);
        for (std::size_t i = 0; i < 10; ++i) {
            c.examples.push_back({"e" + std::to_string(i), g.text(4), g.index(3)});
            p.ids.push_back(c.examples.back().id);
            p.labels.push_back(g.index(3));
        }
        std::vector<LexiconRule> rules;
        for (long r = 0; r < 4; ++r) {
            auto toks = text::tokenize(c.examples[g.index(10)].text);
            rules.push_back({toks.empty() ? g.token() : toks[g.index(toks.size())], g.index(3), r});
        }
        const auto once = apply_lexicon_rules(p, rules, c);
        CHECK(apply_lexicon_rules(once, rules, c).labels == once.labels);
    }
}

TEST_CASE("pipelines on the toy corpus") {
    const auto toy = testing::make_toy_dialects(7, 150, 3);
    const std::size_t K = toy.registry.size();

    auto check_ids = [&](const Predictions& p) {
        CHECK(p.ids.size() == toy.dev.size());
        std::set<std::string> ids(p.ids.begin(), p.ids.end());
        CHECK(ids.size() == toy.dev.size());
        for (const auto& e : toy.dev.examples) CHECK(ids.count(e.id));
    };

    SUBCASE("safina") {
        auto s = SafinaPipeline::train(toy.train, {});
        auto parts = s.component_proba(toy.dev);
        REQUIRE(parts.size() == 3);
        for (const auto& m : parts) CHECK(m.rows() == toy.dev.size());  // rows validated on construction
        check_ids(run_safina_pipeline(toy.train, toy.dev));

        // Soft-voting three copies of one component reproduces it.
        std::vector<ProbabilityMatrix> same(3, parts[1]);
        CHECK(soft_vote(same).values() == parts[1].values());
    }
    SUBCASE("mawdoo3") {
        Mawdoo3Config cfg;
        cfg.seed = 3;
        cfg.folds = 3;
        cfg.logreg.epochs = 5;
        cfg.svm.epochs = 5;
        auto m = Mawdoo3Pipeline::train(toy.train, cfg);
        CHECK(m.stacked_width() == 3 * K + m.tfidf_width());
        for (const auto& x : m.stacked_features(toy.dev)) CHECK(x.dimension() == m.stacked_width());
        CHECK(m.voter_labels(toy.dev).size() == 5);
        check_ids(m.predict(toy.dev));

        cfg.voters.assign(5, StageTwoVoter::dummy);
        auto d = Mawdoo3Pipeline::train(toy.train, cfg).predict(toy.dev);
        std::vector<LabelIndex> y;
        for (const auto& e : toy.train.examples) y.push_back(*e.label);
        const auto constant = classifiers::train_dummy(y, K).label();
        CHECK(std::all_of(d.labels.begin(), d.labels.end(), [&](LabelIndex l) { return l == constant; }));
    }
    SUBCASE("just") {
        JustConfig cfg;
        cfg.seed = 4;
        auto j = JustPipeline::train(toy.train, cfg);
        const auto feats = j.features(toy.dev);
        REQUIRE_FALSE(feats.empty());
        CHECK(feats[0].dimension() == j.feature_width());
        CHECK(j.predict_proba(toy.dev).rows() == toy.dev.size());
        check_ids(run_just_pipeline(toy.train, toy.dev, cfg));
    }
    SUBCASE("voter names") {
        for (auto v : {StageTwoVoter::mnb_ovr, StageTwoVoter::svm, StageTwoVoter::bnb, StageTwoVoter::knn_ovr,
                       StageTwoVoter::dummy})
            CHECK(parse_stage_two_voter(to_string(v)) == v);
        CHECK_THROWS_AS(parse_stage_two_voter("forest"), ValidationError);
    }
}
