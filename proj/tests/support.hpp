#pragma once

// Seeded generators and scratch-file helpers shared by the test binaries.

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dialectid/corpus.hpp"

namespace testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    std::size_t between(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    double real(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return real() < p; }
    std::mt19937_64& engine() { return rng_; }

    // Random probability row of length k, occasionally with exact zeros.
    std::vector<double> simplex(std::size_t k) {
        std::vector<double> v(k);
        double s = 0.0;
        for (auto& x : v) {
            x = coin(0.15) ? 0.0 : real(0.01, 1.0);
            s += x;
        }
        if (s == 0.0) {
            v[index(k)] = 1.0;
            return v;
        }
        for (auto& x : v) x /= s;
        return v;
    }

    // A token drawn from ASCII, Arabic and a few multi-byte scalars.
    std::string token(std::size_t max_len = 6) {
        static const std::vector<std::string> pieces{
            "a", "b", "k", "z", "0", "_", "\xd9\x85", "\xd8\xb1", "\xd8\xa8", "\xd8\xa7", "\xc3\xa9",
            "\xe2\x82\xac", "\xf0\x9f\x98\x80"};
        std::string t;
        const auto n = between(1, max_len);
        for (std::size_t i = 0; i < n; ++i) t += pieces[index(pieces.size())];
        return t;
    }

    // Text with random whitespace runs (ASCII and Unicode spaces).
    std::string text(std::size_t max_tokens = 8) {
        static const std::vector<std::string> spaces{" ", "  ", "\xc2\xa0", "\xe3\x80\x80", " \xe2\x80\x83"};
        std::string s;
        const auto n = between(0, max_tokens);
        for (std::size_t i = 0; i < n; ++i) {
            if (i || coin(0.2)) s += spaces[index(spaces.size())];
            s += token();
        }
        if (coin(0.2)) s += " ";
        return s;
    }

private:
    std::mt19937_64 rng_;
};

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("dialectid-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Toy dialect corpus: each class owns a disjoint set of function words and
// every text mixes a few of them with words from a shared noise vocabulary.

struct ToyDialects {
    dialectid::LabelRegistry registry;
    dialectid::Corpus train;
    dialectid::Corpus dev;
    std::vector<std::vector<std::string>> function_words;  // per class
    std::vector<std::string> noise_words;
};

inline ToyDialects make_toy_dialects(std::uint64_t seed, std::size_t n_examples = 600,
                                     std::size_t n_classes = 3) {
    Gen g(seed);
    ToyDialects t;
    std::vector<std::string> labels;
    for (std::size_t c = 0; c < n_classes; ++c) labels.push_back("D" + std::to_string(c));
    t.registry = dialectid::LabelRegistry(labels);

    // Class words draw from class-specific letters so character models see
    // the difference too; noise words use a shared alphabet.
    const std::vector<std::string> class_letters{"qxz", "jvw", "fhy", "gkp", "bdt"};
    const std::string shared = "aeioulmnrs";
    auto word = [&](const std::string& letters, std::size_t len) {
        std::string w;
        for (std::size_t i = 0; i < len; ++i) {
            w += (i % 2 == 0) ? letters[g.index(letters.size())] : shared[g.index(5)];
        }
        return w;
    };
    t.function_words.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c)
        while (t.function_words[c].size() < 8) {
            auto w = word(class_letters[c % class_letters.size()], g.between(3, 5));
            if (std::find(t.function_words[c].begin(), t.function_words[c].end(), w) ==
                t.function_words[c].end())
                t.function_words[c].push_back(w);
        }
    while (t.noise_words.size() < 40) {
        std::string w;
        const auto len = g.between(3, 6);
        for (std::size_t i = 0; i < len; ++i) w += shared[g.index(shared.size())];
        if (std::find(t.noise_words.begin(), t.noise_words.end(), w) == t.noise_words.end())
            t.noise_words.push_back(w);
    }

    std::vector<dialectid::LabeledExample> all;
    for (std::size_t i = 0; i < n_examples; ++i) {
        const std::size_t c = i % n_classes;
        std::vector<std::string> tokens;
        const auto n_func = g.between(2, 4);
        const auto n_noise = g.between(2, 5);
        for (std::size_t k = 0; k < n_func; ++k)
            tokens.push_back(t.function_words[c][g.index(t.function_words[c].size())]);
        for (std::size_t k = 0; k < n_noise; ++k) tokens.push_back(t.noise_words[g.index(t.noise_words.size())]);
        std::shuffle(tokens.begin(), tokens.end(), g.engine());
        std::string text;
        for (std::size_t k = 0; k < tokens.size(); ++k) text += (k ? " " : "") + tokens[k];
        all.push_back({"ex" + std::to_string(i), text, c});
    }
    std::shuffle(all.begin(), all.end(), g.engine());
    const std::size_t n_train = n_examples * 4 / 5;
    t.train.registry = t.registry;
    t.dev.registry = t.registry;
    t.train.examples.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
    t.dev.examples.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
    return t;
}

// Word vectors for the toy corpus: class words point along their class axis,
// noise words get small random vectors.
inline std::string toy_embeddings_text(const ToyDialects& t, std::uint64_t seed, std::size_t dim = 8) {
    Gen g(seed);
    std::ostringstream out;
    std::size_t count = t.noise_words.size();
    for (const auto& ws : t.function_words) count += ws.size();
    out << count << ' ' << dim << '\n';
    for (std::size_t c = 0; c < t.function_words.size(); ++c)
        for (const auto& w : t.function_words[c]) {
            out << w;
            for (std::size_t d = 0; d < dim; ++d)
                out << ' ' << ((d == c) ? 1.0 + g.real(-0.1, 0.1) : g.real(-0.1, 0.1));
            out << '\n';
        }
    for (const auto& w : t.noise_words) {
        out << w;
        for (std::size_t d = 0; d < dim; ++d) out << ' ' << g.real(-0.3, 0.3);
        out << '\n';
    }
    return out.str();
}

}  // namespace testing
