#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "climsent/corpus.hpp"
#include "climsent/random.hpp"
#include "climsent/stopwords.hpp"

namespace climsent {

/// Knobs for the tweet-like synthetic corpus. Each class owns a small
/// vocabulary; documents mix it with a Zipf-distributed shared vocabulary,
/// leak a little of the other classes' words, and carry the URLs, hashtags,
/// digits and stopwords the preprocessing stage has to clean up.
struct SyntheticCorpusSpec {
    std::size_t documents = 600;
    std::uint64_t seed = 7;
    std::array<double, kNumLabels> class_weights = {0.40, 0.33, 0.27};
    std::size_t shared_vocabulary = 150;
    std::size_t class_vocabulary = 30;
    double own_class_rate = 0.35;    // per-token probability of an own-class word
    double other_class_rate = 0.05;  // per-token probability of another class's word
    std::size_t min_tokens = 8;
    std::size_t max_tokens = 20;
};

namespace detail {

inline std::vector<std::string> make_lexicon(std::size_t count, Rng& rng) {
    static constexpr std::string_view consonants = "bcdfghklmnprstvz";
    static constexpr std::string_view vowels = "aeiou";
    std::set<std::string> taken;
    for (auto w : kEnglishStopwords) taken.emplace(w);
    std::vector<std::string> words;
    while (words.size() < count) {
        const std::size_t syllables = 2 + rng.uniform_index(2);
        std::string w;
        for (std::size_t s = 0; s < syllables; ++s) {
            w += consonants[rng.uniform_index(consonants.size())];
            w += vowels[rng.uniform_index(vowels.size())];
        }
        if (rng.bernoulli(0.5)) w += consonants[rng.uniform_index(consonants.size())];
        if (taken.insert(w).second) words.push_back(w);
    }
    return words;
}

/// Index drawn with probability proportional to 1 / (rank + 1).
inline std::size_t zipf_index(std::size_t n, Rng& rng) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += 1.0 / static_cast<double>(i + 1);
    double u = rng.uniform01() * total;
    for (std::size_t i = 0; i < n; ++i) {
        u -= 1.0 / static_cast<double>(i + 1);
        if (u < 0.0) return i;
    }
    return n - 1;
}

}  // namespace detail

inline LabeledCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec = {}) {
    if (spec.documents == 0 || spec.min_tokens == 0 || spec.max_tokens < spec.min_tokens ||
        spec.class_vocabulary == 0 || spec.shared_vocabulary == 0) {
        throw Error("synthetic corpus: invalid specification");
    }
    Rng lex_rng(derive_seed(spec.seed, "synthetic/lexicon"));
    const auto lexicon = detail::make_lexicon(spec.shared_vocabulary + kNumLabels * spec.class_vocabulary, lex_rng);
    const std::vector<std::string> shared(lexicon.begin(), lexicon.begin() + static_cast<std::ptrdiff_t>(spec.shared_vocabulary));
    std::array<std::vector<std::string>, kNumLabels> own;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        auto first = lexicon.begin() + static_cast<std::ptrdiff_t>(spec.shared_vocabulary + k * spec.class_vocabulary);
        own[k].assign(first, first + static_cast<std::ptrdiff_t>(spec.class_vocabulary));
    }

    // Largest-remainder allocation of documents to classes.
    double weight_sum = 0.0;
    for (double w : spec.class_weights) weight_sum += w;
    std::array<std::size_t, kNumLabels> per_class{};
    std::array<double, kNumLabels> rem{};
    std::size_t assigned = 0;
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        const double exact = static_cast<double>(spec.documents) * spec.class_weights[k] / weight_sum;
        per_class[k] = static_cast<std::size_t>(std::floor(exact));
        rem[k] = exact - std::floor(exact);
        assigned += per_class[k];
    }
    while (assigned < spec.documents) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < kNumLabels; ++k) {
            if (rem[k] > rem[best]) best = k;
        }
        ++per_class[best];
        rem[best] = -1.0;
        ++assigned;
    }

    std::vector<SentimentLabel> labels;
    for (std::size_t k = 0; k < kNumLabels; ++k) labels.insert(labels.end(), per_class[k], kAllLabels[k]);
    Rng rng(derive_seed(spec.seed, "synthetic/documents"));
    rng.shuffle(labels);

    static constexpr std::array<std::string_view, 8> fillers = {"the", "is", "and", "of", "to", "our", "so", "this"};
    static constexpr std::string_view alnum = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

    std::vector<Document> docs;
    docs.reserve(spec.documents);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t k = label_index(labels[i]);
        const std::size_t len = spec.min_tokens + rng.uniform_index(spec.max_tokens - spec.min_tokens + 1);
        std::vector<std::string> words;
        for (std::size_t t = 0; t < len; ++t) {
            const double u = rng.uniform01();
            if (u < spec.own_class_rate) {
                words.push_back(own[k][detail::zipf_index(own[k].size(), rng)]);
            } else if (u < spec.own_class_rate + spec.other_class_rate) {
                const std::size_t other = (k + 1 + rng.uniform_index(kNumLabels - 1)) % kNumLabels;
                words.push_back(own[other][detail::zipf_index(own[other].size(), rng)]);
            } else if (u < spec.own_class_rate + spec.other_class_rate + 0.12) {
                words.emplace_back(fillers[rng.uniform_index(fillers.size())]);
            } else {
                words.push_back(shared[detail::zipf_index(shared.size(), rng)]);
            }
        }
        words.front()[0] = static_cast<char>(words.front()[0] - 'a' + 'A');
        if (rng.bernoulli(0.3)) words.push_back(std::to_string(1990 + rng.uniform_index(40)));
        if (rng.bernoulli(0.4)) {
            std::string tag = own[k][rng.uniform_index(own[k].size())];
            tag[0] = static_cast<char>(tag[0] - 'a' + 'A');
            words.push_back("#" + tag);
        }
        if (rng.bernoulli(0.3)) {
            std::string url = "https://t.co/";
            for (int c = 0; c < 10; ++c) url += alnum[rng.uniform_index(alnum.size())];
            words.push_back(url);
        }
        std::string text;
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (w) text += ' ';
            text += words[w];
        }
        if (rng.bernoulli(0.5)) text += rng.bernoulli(0.5) ? "!" : ".";

        char id[32];
        std::snprintf(id, sizeof id, "syn-%04zu", i + 1);
        docs.push_back({id, std::move(text), labels[i]});
    }
    return LabeledCorpus(std::move(docs), "synthetic(seed=" + std::to_string(spec.seed) + ")");
}

}  // namespace climsent
