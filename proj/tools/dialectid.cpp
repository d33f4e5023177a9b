// dialectid command-line tool. Talks to the library only through dialectid.h.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dialectid/dialectid.h"

namespace {

// Thrown to leave a command with an exit status and message.
struct Failure {
    int status;
    std::string message;
};

void check(did_status s) {
    if (s != DID_OK) throw Failure{static_cast<int>(s), did_last_error()};
}

[[noreturn]] void usage_error(const std::string& msg) { throw Failure{2, msg}; }

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Registry = std::unique_ptr<did_registry, Deleter<did_registry, did_registry_free>>;
using CorpusPtr = std::unique_ptr<did_corpus, Deleter<did_corpus, did_corpus_free>>;
using Model = std::unique_ptr<did_model, Deleter<did_model, did_model_free>>;
using Probs = std::unique_ptr<did_probs, Deleter<did_probs, did_probs_free>>;
using Preds = std::unique_ptr<did_predictions, Deleter<did_predictions, did_predictions_free>>;
using Rules = std::unique_ptr<did_rules, Deleter<did_rules, did_rules_free>>;
using Report = std::unique_ptr<did_report, Deleter<did_report, did_report_free>>;

// Settings shared by every subcommand. Values given on the command line win
// over the config file.
struct Common {
    std::string config;
    std::string labels;
    std::optional<std::uint64_t> seed;
    std::map<std::string, std::string> file;  // config entries not consumed yet
};

// `key = value` lines; `#` starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Failure{1, "cannot open config file " + path};
    std::map<std::string, std::string> out;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            usage_error(path + ":" + std::to_string(n) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        if (key.empty()) usage_error(path + ":" + std::to_string(n) + ": empty key");
        if (!out.emplace(key, trim(line.substr(eq + 1))).second)
            usage_error(path + ":" + std::to_string(n) + ": duplicate key " + key);
    }
    return out;
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        usage_error("invalid " + what + " '" + s + "'");
    }
    if (used != s.size()) usage_error("invalid " + what + " '" + s + "'");
    return v;
}

// Applies config-file entries to settings the command line left unset.
void resolve(Common& c) {
    if (c.config.empty()) return;
    c.file = read_config(c.config);
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = c.file.find(key);
        if (it == c.file.end()) return std::nullopt;
        auto v = it->second;
        c.file.erase(it);
        return v;
    };
    if (auto v = take("labels"); v && c.labels.empty()) c.labels = *v;
    if (auto v = take("seed"); v && !c.seed) c.seed = parse_u64(*v, "seed");
}

// Takes a subcommand-specific config entry if the flag was not given.
void from_config(Common& c, const char* key, CLI::Option* opt, std::string& target) {
    auto it = c.file.find(key);
    if (it == c.file.end()) return;
    if (opt->count() == 0) target = it->second;
    c.file.erase(it);
}

void reject_leftovers(const Common& c) {
    if (!c.file.empty())
        usage_error("unknown config key '" + c.file.begin()->first + "' in " + c.config);
}

Registry load_registry(const Common& c) {
    if (c.labels.empty()) usage_error("a labels file is required (--labels)");
    did_registry* r = nullptr;
    check(did_registry_load(c.labels.c_str(), &r));
    return Registry(r);
}

// The label column is optional for corpora that are only predicted on.
bool has_label_column(const std::string& path) {
    std::ifstream in(path);
    std::string header;
    if (!in || !std::getline(in, header)) return false;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    return header == "id\ttext\tlabel";
}

CorpusPtr load_corpus(const std::string& path, const did_registry* r, bool labeled) {
    did_corpus* c = nullptr;
    check(did_corpus_load(path.c_str(), r, labeled ? 1 : 0, &c));
    return CorpusPtr(c);
}

std::uint64_t require_seed(const Common& c, const std::string& what) {
    if (!c.seed) usage_error(what + " is stochastic and needs --seed");
    return *c.seed;
}

// Four decimals, trailing zeros trimmed, at least one decimal kept.
std::string metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    std::string s = buf;
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return s;
}

std::string default_labels_out(const std::string& out) {
    return std::filesystem::path(out).replace_extension(".labels.tsv").string();
}

void print_counts(const did_corpus* c, const did_registry* r) {
    std::vector<size_t> counts(did_registry_size(r));
    check(did_corpus_stats(c, counts.data(), counts.size()));
    for (size_t i = 0; i < counts.size(); ++i)
        std::cout << did_registry_label(r, i) << '\t' << counts[i] << '\n';
}

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "key = value configuration file");
    cmd->add_option("--labels", c.labels, "label registry, one label per line");
    cmd->add_option("--seed", c.seed, "random seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dialect identification toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(did_version()));

    Common common;
    int exit_status = 0;

    // train
    auto* train = app.add_subcommand("train", "train a model and write its container");
    add_common(train, common);
    std::string train_in, model_out, kind;
    std::vector<std::string> overrides;
    train->add_option("train", train_in, "labeled training TSV")->required();
    train->add_option("model", model_out, "output model file")->required();
    auto* kind_opt = train->add_option("--kind", kind, "model kind");
    train->add_option("--set", overrides, "hyperparameter override key=value");

    // predict
    auto* predict = app.add_subcommand("predict", "write class probabilities and labels");
    add_common(predict, common);
    std::string model_in, eval_in, probs_out, labels_out;
    predict->add_option("model", model_in, "model file")->required();
    predict->add_option("corpus", eval_in, "TSV to predict")->required();
    predict->add_option("out", probs_out, "output probability CSV")->required();
    auto* labels_out_opt =
        predict->add_option("--labels-out", labels_out, "output labels TSV (default: out with extension .labels.tsv)");

    // ensemble
    auto* ensemble = app.add_subcommand("ensemble", "combine probability CSVs");
    add_common(ensemble, common);
    std::vector<std::string> prob_files;
    std::string mode = "soft", ens_out, ens_labels_out;
    ensemble->add_option("inputs", prob_files, "probability CSVs")->required();
    auto* mode_opt = ensemble->add_option("--mode", mode, "soft or hard");
    ensemble->add_option("--out", ens_out, "output probability CSV")->required();
    auto* ens_labels_opt = ensemble->add_option("--labels-out", ens_labels_out, "output labels TSV");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score predicted labels");
    add_common(evaluate, common);
    std::string gold_in, pred_in, report_out, format = "text", confusion_out, normalize = "false";
    evaluate->add_option("gold", gold_in, "labeled gold TSV")->required();
    evaluate->add_option("predictions", pred_in, "predicted labels TSV")->required();
    auto* report_opt = evaluate->add_option("--report", report_out, "report output path");
    auto* format_opt = evaluate->add_option("--format", format, "text, csv or json");
    auto* confusion_opt = evaluate->add_option("--confusion", confusion_out, "confusion CSV path");
    auto* normalize_opt = evaluate->add_option("--normalize", normalize, "row-normalize the confusion CSV");

    // augment
    auto* augment = app.add_subcommand("augment", "balance classes by token shuffling");
    add_common(augment, common);
    std::string aug_in, aug_out, target = "0";
    augment->add_option("train", aug_in, "labeled TSV")->required();
    augment->add_option("out", aug_out, "output TSV")->required();
    auto* target_opt = augment->add_option("--target", target, "per-class target count");

    // stats
    auto* stats = app.add_subcommand("stats", "per-label example counts");
    add_common(stats, common);
    std::string stats_in;
    stats->add_option("corpus", stats_in, "labeled TSV")->required();

    // rules
    auto* rules = app.add_subcommand("rules", "apply lexicon rules to predicted labels");
    add_common(rules, common);
    std::string rules_pred, rules_corpus, rules_file, rules_out;
    rules->add_option("predictions", rules_pred, "predicted labels TSV")->required();
    rules->add_option("corpus", rules_corpus, "TSV with the texts")->required();
    rules->add_option("rules", rules_file, "rules TSV: token, label, priority")->required();
    rules->add_option("out", rules_out, "output labels TSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        resolve(common);

        if (*train) {
            from_config(common, "kind", kind_opt, kind);
            if (kind.empty()) usage_error("a model kind is required (--kind or kind in the config)");
            // Remaining config entries are hyperparameters; --set wins.
            std::map<std::string, std::string> hp = common.file;
            common.file.clear();
            for (const auto& kv : overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0) usage_error("--set expects key=value, got '" + kv + "'");
                hp[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            int stochastic = 0;
            check(did_model_requires_seed(kind.c_str(), &stochastic));
            if (stochastic && !hp.count("seed")) hp["seed"] = std::to_string(require_seed(common, kind));

            auto reg = load_registry(common);
            auto corpus = load_corpus(train_in, reg.get(), true);
            std::vector<const char*> keys, values;
            for (const auto& [k, v] : hp) {
                keys.push_back(k.c_str());
                values.push_back(v.c_str());
            }
            did_model* m = nullptr;
            check(did_model_train(kind.c_str(), corpus.get(), keys.data(), values.data(), keys.size(), &m));
            Model model(m);
            check(did_model_save(model.get(), model_out.c_str()));
            print_counts(corpus.get(), reg.get());
            std::cout << "wrote " << kind << " model to " << model_out << '\n';
        } else if (*predict) {
            from_config(common, "labels-out", labels_out_opt, labels_out);
            reject_leftovers(common);
            did_model* m = nullptr;
            check(did_model_load(model_in.c_str(), &m));
            Model model(m);
            auto reg = load_registry(common);
            check(did_model_check_registry(model.get(), reg.get()));
            auto corpus = load_corpus(eval_in, reg.get(), has_label_column(eval_in));
            did_predictions* p = nullptr;
            check(did_model_predict(model.get(), corpus.get(), &p));
            Preds preds(p);
            did_probs* pr = nullptr;
            check(did_predictions_probs(preds.get(), &pr));
            Probs probs(pr);
            check(did_probs_save(probs.get(), probs_out.c_str()));
            if (labels_out.empty()) labels_out = default_labels_out(probs_out);
            check(did_predictions_save(preds.get(), labels_out.c_str()));
            std::cout << "wrote " << did_predictions_size(preds.get()) << " predictions to " << probs_out
                      << " and " << labels_out << '\n';
        } else if (*ensemble) {
            from_config(common, "mode", mode_opt, mode);
            from_config(common, "labels-out", ens_labels_opt, ens_labels_out);
            reject_leftovers(common);
            if (mode != "soft" && mode != "hard") usage_error("--mode must be soft or hard, got '" + mode + "'");
            auto reg = load_registry(common);
            std::vector<Probs> mats;
            for (const auto& f : prob_files) {
                did_probs* pr = nullptr;
                check(did_probs_load(f.c_str(), reg.get(), &pr));
                mats.emplace_back(pr);
            }
            Preds out;
            if (mode == "soft") {
                std::vector<const did_probs*> raw;
                for (const auto& m : mats) raw.push_back(m.get());
                did_probs* avg = nullptr;
                check(did_soft_vote(raw.data(), raw.size(), &avg));
                Probs averaged(avg);
                did_predictions* p = nullptr;
                check(did_probs_argmax(averaged.get(), &p));
                out.reset(p);
            } else {
                std::vector<Preds> voters;
                std::vector<const did_predictions*> raw;
                for (const auto& m : mats) {
                    did_predictions* p = nullptr;
                    check(did_probs_argmax(m.get(), &p));
                    voters.emplace_back(p);
                    raw.push_back(p);
                }
                did_predictions* p = nullptr;
                check(did_hard_vote(raw.data(), raw.size(), &p));
                out.reset(p);
            }
            did_probs* pr = nullptr;
            check(did_predictions_probs(out.get(), &pr));
            Probs probs(pr);
            check(did_probs_save(probs.get(), ens_out.c_str()));
            if (ens_labels_out.empty()) ens_labels_out = default_labels_out(ens_out);
            check(did_predictions_save(out.get(), ens_labels_out.c_str()));
            std::cout << mode << " vote over " << mats.size() << " matrices: wrote " << ens_out << " and "
                      << ens_labels_out << '\n';
        } else if (*evaluate) {
            from_config(common, "report", report_opt, report_out);
            from_config(common, "format", format_opt, format);
            from_config(common, "confusion", confusion_opt, confusion_out);
            from_config(common, "normalize", normalize_opt, normalize);
            reject_leftovers(common);
            did_report_format fmt;
            if (format == "text") fmt = DID_REPORT_TEXT;
            else if (format == "csv") fmt = DID_REPORT_CSV;
            else if (format == "json") fmt = DID_REPORT_JSON;
            else usage_error("--format must be text, csv or json, got '" + format + "'");
            if (normalize != "true" && normalize != "false")
                usage_error("--normalize must be true or false, got '" + normalize + "'");
            auto reg = load_registry(common);
            auto gold = load_corpus(gold_in, reg.get(), true);
            did_predictions* p = nullptr;
            check(did_predictions_load(pred_in.c_str(), reg.get(), &p));
            Preds preds(p);
            did_report* r = nullptr;
            check(did_evaluate(gold.get(), preds.get(), &r));
            Report report(r);
            if (!report_out.empty()) check(did_report_write(report.get(), fmt, report_out.c_str()));
            if (!confusion_out.empty())
                check(did_report_confusion_csv(report.get(), confusion_out.c_str(), normalize == "true"));
            std::cout << "accuracy=" << metric(did_report_accuracy(report.get()))
                      << " macro_f1=" << metric(did_report_macro_f1(report.get()))
                      << " micro_f1=" << metric(did_report_micro_f1(report.get())) << '\n';
        } else if (*augment) {
            from_config(common, "target", target_opt, target);
            reject_leftovers(common);
            const auto seed = require_seed(common, "augment");
            const auto tgt = parse_u64(target, "target");
            auto reg = load_registry(common);
            auto corpus = load_corpus(aug_in, reg.get(), true);
            did_corpus* b = nullptr;
            check(did_corpus_balance(corpus.get(), seed, tgt, &b));
            CorpusPtr balanced(b);
            check(did_corpus_save(balanced.get(), aug_out.c_str()));
            print_counts(balanced.get(), reg.get());
            std::cout << "wrote " << did_corpus_size(balanced.get()) << " examples to " << aug_out << '\n';
        } else if (*stats) {
            reject_leftovers(common);
            auto reg = load_registry(common);
            auto corpus = load_corpus(stats_in, reg.get(), true);
            print_counts(corpus.get(), reg.get());
            std::cout << "total\t" << did_corpus_size(corpus.get()) << '\n';
        } else if (*rules) {
            reject_leftovers(common);
            auto reg = load_registry(common);
            did_predictions* p = nullptr;
            check(did_predictions_load(rules_pred.c_str(), reg.get(), &p));
            Preds preds(p);
            auto corpus = load_corpus(rules_corpus, reg.get(), has_label_column(rules_corpus));
            did_rules* rs = nullptr;
            check(did_rules_load(rules_file.c_str(), reg.get(), &rs));
            Rules lexicon(rs);
            did_predictions* q = nullptr;
            check(did_rules_apply(preds.get(), lexicon.get(), corpus.get(), &q));
            Preds applied(q);
            check(did_predictions_save(applied.get(), rules_out.c_str()));
            size_t changed = 0;
            for (size_t i = 0; i < did_predictions_size(applied.get()); ++i)
                if (std::string(did_predictions_label(applied.get(), i)) !=
                    did_predictions_label(preds.get(), i))
                    ++changed;
            std::cout << did_rules_size(lexicon.get()) << " rules changed " << changed << " of "
                      << did_predictions_size(applied.get()) << " labels; wrote " << rules_out << '\n';
        }
    } catch (const Failure& f) {
        std::cerr << "dialectid: " << f.message << '\n';
        exit_status = f.status;
    }
    return exit_status;
}
