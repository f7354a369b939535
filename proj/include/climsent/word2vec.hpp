#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "climsent/error.hpp"
#include "climsent/features.hpp"
#include "climsent/random.hpp"

namespace climsent {

struct Word2VecParams {
    std::size_t dim = 100;
    std::size_t window = 5;
    std::size_t negatives = 5;
    std::size_t epochs = 5;
    double learning_rate = 0.025;  // decays linearly to 1e-4 of the start value
    std::size_t min_count = 1;
    std::uint64_t seed = 42;
};

/// Term -> dense vector, every vector of the same dimension. Terms are kept in
/// ascending lexicographic order.
class EmbeddingTable {
public:
    EmbeddingTable() = default;

    EmbeddingTable(std::size_t dim, std::vector<std::string> terms, std::vector<double> flat)
        : dim_(dim), terms_(std::move(terms)), flat_(std::move(flat)) {
        if (flat_.size() != dim_ * terms_.size()) throw Error("embedding table: storage does not match dim x terms");
        for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }

    std::optional<std::size_t> index_of(const std::string& term) const {
        auto it = index_.find(term);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::span<const double> vector(std::size_t i) const { return {flat_.data() + i * dim_, dim_}; }

    std::span<const double> vector(const std::string& term) const {
        auto idx = index_of(term);
        if (!idx) throw Error("embedding table: unknown term \"" + term + "\"");
        return vector(*idx);
    }

    friend bool operator==(const EmbeddingTable& a, const EmbeddingTable& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_ && a.flat_ == b.flat_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> terms_;
    std::vector<double> flat_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Skip-gram with negative sampling, single-threaded and fully determined by
/// params.seed. Negatives are drawn from the unigram distribution raised to
/// the 0.75 power.
inline EmbeddingTable train_word_embeddings(std::span<const TokenSequence> corpus, const Word2VecParams& params) {
    if (params.dim == 0 || params.window == 0 || params.epochs == 0 || !(params.learning_rate > 0.0)) {
        throw Error("word2vec: dim, window, epochs and learning_rate must be positive");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& seq : corpus) {
        for (const auto& t : seq.tokens) ++counts[t];
    }
    std::vector<std::string> terms;
    std::vector<std::size_t> freq;
    for (auto& [t, c] : counts) {
        if (c >= params.min_count) {
            terms.push_back(t);
            freq.push_back(c);
        }
    }
    if (terms.empty()) throw Error("word2vec: empty corpus");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < terms.size(); ++i) index.emplace(terms[i], i);

    std::vector<std::vector<std::size_t>> sentences;
    std::size_t total_words = 0;
    for (const auto& seq : corpus) {
        std::vector<std::size_t> ids;
        for (const auto& t : seq.tokens) {
            if (auto it = index.find(t); it != index.end()) ids.push_back(it->second);
        }
        total_words += ids.size();
        if (!ids.empty()) sentences.push_back(std::move(ids));
    }

    std::vector<double> cumulative(terms.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        acc += std::pow(static_cast<double>(freq[i]), 0.75);
        cumulative[i] = acc;
    }

    const std::size_t dim = params.dim;
    Rng rng(params.seed);
    std::vector<double> input(terms.size() * dim);
    for (auto& v : input) v = (rng.uniform01() - 0.5) / static_cast<double>(dim);
    std::vector<double> output(terms.size() * dim, 0.0);
    std::vector<double> grad(dim);

    auto draw_negative = [&]() {
        const double u = rng.uniform01() * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), terms.size() - 1);
    };

    const double schedule = static_cast<double>(params.epochs * total_words) + 1.0;
    std::size_t processed = 0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        for (const auto& sent : sentences) {
            for (std::size_t pos = 0; pos < sent.size(); ++pos) {
                const double lr = params.learning_rate *
                                  std::max(1.0 - static_cast<double>(processed) / schedule, 1e-4);
                ++processed;
                double* center = input.data() + sent[pos] * dim;
                const std::size_t lo = pos >= params.window ? pos - params.window : 0;
                const std::size_t hi = std::min(sent.size() - 1, pos + params.window);
                for (std::size_t ctx = lo; ctx <= hi; ++ctx) {
                    if (ctx == pos) continue;
                    std::fill(grad.begin(), grad.end(), 0.0);
                    for (std::size_t d = 0; d <= params.negatives; ++d) {
                        std::size_t target;
                        double label;
                        if (d == 0) {
                            target = sent[ctx];
                            label = 1.0;
                        } else {
                            target = draw_negative();
                            if (target == sent[ctx]) continue;
                            label = 0.0;
                        }
                        double* out = output.data() + target * dim;
                        double f = 0.0;
                        for (std::size_t k = 0; k < dim; ++k) f += center[k] * out[k];
                        const double g = (label - 1.0 / (1.0 + std::exp(-f))) * lr;
                        for (std::size_t k = 0; k < dim; ++k) grad[k] += g * out[k];
                        for (std::size_t k = 0; k < dim; ++k) out[k] += g * center[k];
                    }
                    for (std::size_t k = 0; k < dim; ++k) center[k] += grad[k];
                }
            }
        }
    }
    return EmbeddingTable(dim, std::move(terms), std::move(input));
}

/// Mean of the in-vocabulary token vectors; zero vector when there are none.
inline DenseRow encode_mean_embedding(const TokenSequence& seq, const EmbeddingTable& table) {
    DenseRow row(table.dim(), 0.0);
    std::size_t n = 0;
    for (const auto& t : seq.tokens) {
        if (auto idx = table.index_of(t)) {
            auto v = table.vector(*idx);
            for (std::size_t k = 0; k < row.size(); ++k) row[k] += v[k];
            ++n;
        }
    }
    if (n > 0) {
        for (auto& x : row) x /= static_cast<double>(n);
    }
    return row;
}

struct Word2VecEncoder {
    EmbeddingTable table;

    static Word2VecEncoder fit(std::span<const TokenSequence> train, const Word2VecParams& params) {
        return {train_word_embeddings(train, params)};
    }

    FeatureMatrix transform(std::span<const TokenSequence> seqs) const {
        std::vector<DenseRow> rows;
        rows.reserve(seqs.size());
        for (const auto& s : seqs) rows.push_back(encode_mean_embedding(s, table));
        return FeatureMatrix::dense(row_ids_of(seqs), table.dim(), rows, "word2vec");
    }
};

}  // namespace climsent
