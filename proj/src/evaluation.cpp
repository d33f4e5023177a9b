#include "dialectid/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include "json.hpp"

#include "dialectid/error.hpp"
#include "io_util.hpp"

namespace dialectid::evaluation {

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (auto v : counts_) t += v;
    return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t gold) const {
    std::size_t t = 0;
    for (std::size_t p = 0; p < n_; ++p) t += at(gold, p);
    return t;
}

std::size_t ConfusionMatrix::col_sum(std::size_t pred) const {
    std::size_t t = 0;
    for (std::size_t g = 0; g < n_; ++g) t += at(g, pred);
    return t;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvaluationReport evaluate_labels(std::span<const LabelIndex> gold, std::span<const LabelIndex> pred,
                                 const LabelRegistry& registry) {
    if (gold.size() != pred.size())
        throw ValidationError("evaluate: gold and predicted sequences differ in length");
    const std::size_t K = registry.size();
    EvaluationReport r;
    r.registry = registry;
    r.n_examples = gold.size();
    r.confusion = ConfusionMatrix(K);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] >= K || pred[i] >= K) throw ValidationError("evaluate: label index out of range");
        r.confusion.add(gold[i], pred[i]);
    }

    std::size_t tp_total = 0;
    double f1_sum = 0.0;
    r.per_class.resize(K);
    for (std::size_t c = 0; c < K; ++c) {
        const std::size_t tp = r.confusion.at(c, c);
        const std::size_t fp = r.confusion.col_sum(c) - tp;
        const std::size_t fn = r.confusion.row_sum(c) - tp;
        auto& s = r.per_class[c];
        s.precision = ratio(tp, tp + fp);
        s.recall = ratio(tp, tp + fn);
        // Equals 2PR/(P+R), and 0 when P + R = 0.
        s.f1 = ratio(2 * tp, 2 * tp + fp + fn);
        s.support = tp + fn;
        tp_total += tp;
        f1_sum += s.f1;
    }
    const std::size_t n = gold.size();
    r.accuracy = ratio(tp_total, n);
    // Pooled FP and FN both equal n - TP, so this is exactly the accuracy.
    r.micro_f1 = ratio(2 * tp_total, 2 * tp_total + 2 * (n - tp_total));
    r.macro_f1 = f1_sum / static_cast<double>(K);
    return r;
}

EvaluationReport evaluate(const Corpus& gold, const ensembles::Predictions& preds) {
    if (gold.registry != preds.registry)
        throw ValidationError("evaluate: gold and predictions use different label registries");
    std::unordered_map<std::string_view, std::size_t> pred_index;
    for (std::size_t i = 0; i < preds.size(); ++i) pred_index.emplace(preds.ids[i], i);

    std::vector<std::string> missing_preds;
    std::vector<LabelIndex> g, p;
    std::unordered_map<std::string_view, bool> gold_ids;
    for (const auto& e : gold.examples) {
        if (!e.label) throw ValidationError("evaluate: gold example " + e.id + " has no label");
        gold_ids.emplace(e.id, true);
        auto it = pred_index.find(e.id);
        if (it == pred_index.end()) {
            missing_preds.push_back(e.id);
            continue;
        }
        g.push_back(*e.label);
        p.push_back(preds.labels[it->second]);
    }
    std::vector<std::string> missing_gold;
    for (const auto& id : preds.ids)
        if (!gold_ids.count(id)) missing_gold.push_back(id);

    if (!missing_preds.empty() || !missing_gold.empty()) {
        auto list = [](const std::vector<std::string>& ids) {
            std::string s;
            for (std::size_t i = 0; i < ids.size() && i < 20; ++i) s += (i ? "," : "") + ids[i];
            if (ids.size() > 20) s += ",...";
            return s;
        };
        std::string msg = "evaluate: id mismatch;";
        if (!missing_preds.empty()) msg += " missing predictions for [" + list(missing_preds) + "]";
        if (!missing_gold.empty()) msg += " predictions without gold for [" + list(missing_gold) + "]";
        throw ValidationError(msg);
    }
    return evaluate_labels(g, p, gold.registry);
}

std::string render_report(const EvaluationReport& r, ReportFormat format) {
    const std::size_t K = r.registry.size();
    if (format == ReportFormat::json) {
        nlohmann::ordered_json j;
        j["n_examples"] = r.n_examples;
        j["accuracy"] = r.accuracy;
        j["micro_f1"] = r.micro_f1;
        j["macro_f1"] = r.macro_f1;
        j["labels"] = r.registry.labels();
        auto per = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < K; ++c) {
            const auto& s = r.per_class[c];
            per.push_back({{"label", r.registry.label(c)},
                           {"precision", s.precision},
                           {"recall", s.recall},
                           {"f1", s.f1},
                           {"support", s.support}});
        }
        j["per_class"] = std::move(per);
        auto rows = nlohmann::ordered_json::array();
        for (std::size_t g = 0; g < K; ++g) {
            std::vector<std::size_t> row(K);
            for (std::size_t p = 0; p < K; ++p) row[p] = r.confusion.at(g, p);
            rows.push_back(row);
        }
        j["confusion_matrix"] = std::move(rows);
        return j.dump(2) + "\n";
    }
    if (format == ReportFormat::csv) {
        std::string out = "label,precision,recall,f1,support\n";
        for (std::size_t c = 0; c < K; ++c) {
            const auto& s = r.per_class[c];
            out += r.registry.label(c) + "," + format_double(s.precision) + "," +
                   format_double(s.recall) + "," + format_double(s.f1) + "," +
                   std::to_string(s.support) + "\n";
        }
        out += "accuracy,,," + format_double(r.accuracy) + "," + std::to_string(r.n_examples) + "\n";
        out += "micro_f1,,," + format_double(r.micro_f1) + "," + std::to_string(r.n_examples) + "\n";
        out += "macro_f1,,," + format_double(r.macro_f1) + "," + std::to_string(r.n_examples) + "\n";
        return out;
    }

    std::size_t width = 8;
    for (const auto& l : r.registry.labels()) width = std::max(width, l.size() + 2);
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %10s %10s %10s %10s\n", static_cast<int>(width), "label",
                  "precision", "recall", "f1", "support");
    out += buf;
    for (std::size_t c = 0; c < K; ++c) {
        const auto& s = r.per_class[c];
        std::snprintf(buf, sizeof buf, "%-*s %10.4f %10.4f %10.4f %10zu\n", static_cast<int>(width),
                      r.registry.label(c).c_str(), s.precision, s.recall, s.f1, s.support);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "\naccuracy %.4f\nmicro_f1 %.4f\nmacro_f1 %.4f\nexamples %zu\n",
                  r.accuracy, r.micro_f1, r.macro_f1, r.n_examples);
    out += buf;
    return out;
}

void emit_report(const EvaluationReport& r, ReportFormat format, const std::filesystem::path& path) {
    detail::write_file(path, render_report(r, format));
}

std::string render_confusion_csv(const EvaluationReport& r, bool row_normalized) {
    const std::size_t K = r.registry.size();
    std::string out = "gold\\pred";
    for (const auto& l : r.registry.labels()) out += "," + l;
    out += "\n";
    for (std::size_t g = 0; g < K; ++g) {
        out += r.registry.label(g);
        const std::size_t support = r.confusion.row_sum(g);
        for (std::size_t p = 0; p < K; ++p) {
            const std::size_t v = r.confusion.at(g, p);
            out += ",";
            out += row_normalized ? format_double(ratio(v, support)) : std::to_string(v);
        }
        out += "\n";
    }
    return out;
}

void emit_confusion_csv(const EvaluationReport& r, const std::filesystem::path& path,
                        bool row_normalized) {
    detail::write_file(path, render_confusion_csv(r, row_normalized));
}

}  // namespace dialectid::evaluation
