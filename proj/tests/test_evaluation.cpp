#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dialectid/error.hpp"
#include "dialectid/evaluation.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include "json.hpp"

using namespace dialectid;
using namespace dialectid::evaluation;
using Labels = std::vector<LabelIndex>;

namespace {

LabelRegistry registry_of(std::size_t k) {
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < k; ++c) labels.push_back("C" + std::to_string(c));
    return LabelRegistry(labels);
}

}  // namespace

TEST_CASE("worked example") {
    const LabelRegistry reg({"A", "B"});
    auto r = evaluate_labels(Labels{0, 0, 1}, Labels{0, 1, 1}, reg);
    CHECK(r.accuracy == doctest::Approx(2.0 / 3.0));
    CHECK(r.micro_f1 == r.accuracy);
    CHECK(r.macro_f1 == doctest::Approx(2.0 / 3.0));
    CHECK(r.per_class[0].precision == 1.0);
    CHECK(r.per_class[0].recall == 0.5);
    CHECK(r.per_class[1].precision == 0.5);
    CHECK(r.per_class[1].recall == 1.0);
    CHECK(r.per_class[1].support == 1);
    CHECK(r.confusion.at(0, 1) == 1);
}

TEST_CASE("all one class") {
    const LabelRegistry reg({"A", "B"});
    auto r = evaluate_labels(Labels{0, 1}, Labels{0, 0}, reg);
    CHECK(r.accuracy == 0.5);
    CHECK(r.macro_f1 == doctest::Approx(1.0 / 3.0));
    CHECK(r.per_class[1].f1 == 0.0);
}

TEST_CASE("perfect predictions and absent classes") {
    auto r = evaluate_labels(Labels{0, 1, 1}, Labels{0, 1, 1}, registry_of(3));
    CHECK(r.accuracy == 1.0);
    CHECK(r.confusion.at(1, 1) == 2);
    CHECK(r.confusion.at(0, 1) == 0);
    // The third class is absent on both sides and still counts toward macro-F1.
    CHECK(r.macro_f1 == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(evaluate_labels(Labels{0}, Labels{}, registry_of(2)), ValidationError);
}

TEST_CASE("evaluate matches by id") {
    const LabelRegistry reg({"A", "B"});
    Corpus gold{{{"x", "", 0}, {"y", "", 1}}, reg};
    ensembles::Predictions p;
    p.registry = reg;
    p.ids = {"y", "x"};
    p.labels = {1, 0};
    CHECK(evaluate(gold, p).accuracy == 1.0);
    p.ids = {"y", "z"};
    try {
        evaluate(gold, p);
        FAIL("expected a mismatch");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("x") != std::string::npos);
    }
}

TEST_CASE("property: agrees with brute-force counting; micro-F1 is accuracy") {
    testing::Gen g(81);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t K = g.between(1, 6), n = g.between(1, 60);
        Labels gold(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = g.index(K);
            pred[i] = g.coin(0.4) ? gold[i] : g.index(K);
        }
        const auto reg = registry_of(K);
        const auto r = evaluate_labels(gold, pred, reg);
        const auto o = oracle::count_metrics({gold.begin(), gold.end()}, {pred.begin(), pred.end()}, K);
        CHECK(r.micro_f1 == r.accuracy);
        CHECK(std::fabs(r.accuracy - o.accuracy) <= 1e-12);
        CHECK(std::fabs(r.micro_f1 - o.micro_f1) <= 1e-12);
        CHECK(std::fabs(r.macro_f1 - o.macro_f1) <= 1e-12);
        for (std::size_t c = 0; c < K; ++c) {
            CHECK(std::fabs(r.per_class[c].precision - o.precision[c]) <= 1e-12);
            CHECK(std::fabs(r.per_class[c].recall - o.recall[c]) <= 1e-12);
            CHECK(std::fabs(r.per_class[c].f1 - o.f1[c]) <= 1e-12);
            CHECK(r.confusion.row_sum(c) == o.support[c]);
            CHECK(r.confusion.col_sum(c) == static_cast<std::size_t>(std::count(pred.begin(), pred.end(), c)));
        }
        CHECK(r.confusion.total() == n);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), g.engine());
        Labels pg(n), pp(n);
        for (std::size_t i = 0; i < n; ++i) {
            pg[i] = gold[perm[i]];
            pp[i] = pred[perm[i]];
        }
        const auto s = evaluate_labels(pg, pp, reg);
        CHECK(s.macro_f1 == r.macro_f1);
        CHECK(s.accuracy == r.accuracy);
    }
}

TEST_CASE("reports") {
    const LabelRegistry reg({"A", "B"});
    auto r = evaluate_labels(Labels{0, 0, 1}, Labels{0, 1, 1}, reg);
    testing::TempDir dir("report");

    const auto grid = render_confusion_csv(r);
    CHECK(grid == "gold\\pred,A,B\nA,1,1\nB,0,1\n");
    emit_confusion_csv(r, dir / "a.csv");
    emit_confusion_csv(r, dir / "b.csv");
    CHECK(testing::read_text(dir / "a.csv") == testing::read_text(dir / "b.csv"));

    const auto norm = render_confusion_csv(r, true);
    CHECK(norm == "gold\\pred,A,B\nA,0.5,0.5\nB,0,1\n");

    auto j = nlohmann::json::parse(render_report(r, ReportFormat::json));
    CHECK(j["accuracy"].get<double>() == r.accuracy);
    CHECK(j["per_class"].size() == 2);
    CHECK(j["confusion_matrix"][0][1].get<int>() == 1);

    for (auto f : {ReportFormat::text, ReportFormat::csv, ReportFormat::json})
        CHECK(render_report(r, f) == render_report(r, f));
    CHECK_THROWS_AS(emit_report(r, ReportFormat::text, dir / "missing" / "r.txt"), IoError);
}

TEST_CASE("property: row-normalized confusion rows sum to one") {
    testing::Gen g(82);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t K = g.between(2, 5), n = g.between(1, 40);
        Labels gold(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            gold[i] = g.index(K);
            pred[i] = g.index(K);
        }
        const auto r = evaluate_labels(gold, pred, registry_of(K));
        std::istringstream in(render_confusion_csv(r, true));
        std::string line;
        std::getline(in, line);
        for (std::size_t c = 0; c < K; ++c) {
            REQUIRE(std::getline(in, line));
            double sum = 0;
            std::istringstream cells(line.substr(line.find(',') + 1));
            std::string cell;
            while (std::getline(cells, cell, ',')) sum += parse_double(cell);
            if (r.confusion.row_sum(c)) CHECK(std::fabs(sum - 1.0) < 1e-9);
            else CHECK(sum == 0.0);
        }
    }
}
