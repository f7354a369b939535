#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "climsent/error.hpp"
#include "climsent/preprocess.hpp"

namespace climsent {

struct SparseEntry {
    std::size_t index = 0;
    double value = 0.0;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Entries sorted by strictly increasing index.
using SparseRow = std::vector<SparseEntry>;
using DenseRow = std::vector<double>;

/// Row-per-document feature matrix, stored either sparse (per-row index/value
/// lists) or dense (row-major). Construction validates shape and finiteness.
class FeatureMatrix {
public:
    enum class Layout { sparse, dense };

    FeatureMatrix() = default;

    static FeatureMatrix sparse(std::vector<std::string> row_ids, std::size_t cols, std::vector<SparseRow> rows,
                                std::string encoding_name) {
        if (row_ids.size() != rows.size()) throw Error("feature matrix: row id count differs from row count");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t k = 0; k < rows[r].size(); ++k) {
                const auto& e = rows[r][k];
                if (e.index >= cols) {
                    throw Error("feature matrix: row " + std::to_string(r) + " index " + std::to_string(e.index) +
                                " out of range for " + std::to_string(cols) + " columns");
                }
                if (k > 0 && rows[r][k - 1].index >= e.index) {
                    throw Error("feature matrix: row " + std::to_string(r) + " indices not strictly increasing");
                }
                if (!std::isfinite(e.value)) throw Error("feature matrix: non-finite value in row " + std::to_string(r));
            }
        }
        FeatureMatrix m;
        m.layout_ = Layout::sparse;
        m.row_ids_ = std::move(row_ids);
        m.cols_ = cols;
        m.sparse_ = std::move(rows);
        m.name_ = std::move(encoding_name);
        return m;
    }

    static FeatureMatrix dense(std::vector<std::string> row_ids, std::size_t cols, const std::vector<DenseRow>& rows,
                               std::string encoding_name) {
        if (row_ids.size() != rows.size()) throw Error("feature matrix: row id count differs from row count");
        FeatureMatrix m;
        m.layout_ = Layout::dense;
        m.cols_ = cols;
        m.dense_.reserve(rows.size() * cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) {
                throw Error("feature matrix: dense row " + std::to_string(r) + " has width " +
                            std::to_string(rows[r].size()) + ", expected " + std::to_string(cols));
            }
            for (double v : rows[r]) {
                if (!std::isfinite(v)) throw Error("feature matrix: non-finite value in row " + std::to_string(r));
                m.dense_.push_back(v);
            }
        }
        m.row_ids_ = std::move(row_ids);
        m.name_ = std::move(encoding_name);
        return m;
    }

    Layout layout() const noexcept { return layout_; }
    std::size_t rows() const noexcept { return row_ids_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    const std::string& encoding_name() const noexcept { return name_; }

    /// Visits (column, value) for every stored entry of row r. Dense rows
    /// visit every column.
    template <class F>
    void for_each_entry(std::size_t r, F&& f) const {
        if (layout_ == Layout::sparse) {
            for (const auto& e : sparse_[r]) f(e.index, e.value);
        } else {
            const double* row = dense_.data() + r * cols_;
            for (std::size_t c = 0; c < cols_; ++c) f(c, row[c]);
        }
    }

    /// Dot product of row r with w[0, cols).
    double dot(std::size_t r, std::span<const double> w) const {
        double s = 0.0;
        for_each_entry(r, [&](std::size_t c, double v) { s += v * w[c]; });
        return s;
    }

    double at(std::size_t r, std::size_t c) const {
        if (layout_ == Layout::dense) return dense_[r * cols_ + c];
        const auto& row = sparse_[r];
        auto it = std::lower_bound(row.begin(), row.end(), c,
                                   [](const SparseEntry& e, std::size_t col) { return e.index < col; });
        return (it != row.end() && it->index == c) ? it->value : 0.0;
    }

    SparseRow sparse_row(std::size_t r) const {
        if (layout_ == Layout::sparse) return sparse_[r];
        SparseRow out;
        for_each_entry(r, [&](std::size_t c, double v) {
            if (v != 0.0) out.push_back({c, v});
        });
        return out;
    }

    DenseRow dense_row(std::size_t r) const {
        DenseRow out(cols_, 0.0);
        for_each_entry(r, [&](std::size_t c, double v) { out[c] = v; });
        return out;
    }

    friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
        if (a.rows() != b.rows() || a.cols_ != b.cols_ || a.row_ids_ != b.row_ids_ || a.name_ != b.name_) return false;
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (a.sparse_row(r) != b.sparse_row(r)) return false;
        }
        return true;
    }

private:
    Layout layout_ = Layout::sparse;
    std::vector<std::string> row_ids_;
    std::size_t cols_ = 0;
    std::vector<SparseRow> sparse_;
    std::vector<double> dense_;
    std::string name_;
};

inline std::vector<std::string> row_ids_of(std::span<const TokenSequence> seqs) {
    std::vector<std::string> ids;
    ids.reserve(seqs.size());
    for (const auto& s : seqs) ids.push_back(s.doc_id);
    return ids;
}

/// Fitted term index. Indices follow ascending lexicographic term order.
class Vocabulary {
public:
    Vocabulary() = default;

    Vocabulary(std::vector<std::string> sorted_terms, std::vector<std::size_t> df, std::size_t corpus_size)
        : terms_(std::move(sorted_terms)), df_(std::move(df)), corpus_size_(corpus_size) {
        for (std::size_t i = 0; i < terms_.size(); ++i) index_.emplace(terms_[i], i);
    }

    std::size_t size() const noexcept { return terms_.size(); }
    std::size_t corpus_size() const noexcept { return corpus_size_; }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::vector<std::size_t>& document_frequency() const noexcept { return df_; }

    std::optional<std::size_t> index_of(const std::string& term) const {
        auto it = index_.find(term);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(const std::string& term) const { return index_.count(term) > 0; }

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> df_;
    std::size_t corpus_size_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Keeps terms with df >= min_df; with max_features, keeps the highest-df
/// terms (ties to the lexicographically smaller term).
inline Vocabulary fit_vocab(std::span<const TokenSequence> corpus, std::size_t min_df = 1,
                            std::optional<std::size_t> max_features = std::nullopt) {
    if (min_df < 1) throw Error("fit_vocab: min_df must be >= 1");
    const bool any_tokens =
        std::any_of(corpus.begin(), corpus.end(), [](const TokenSequence& s) { return !s.tokens.empty(); });
    if (!any_tokens) throw Error("fit_vocab: corpus has no nonempty token sequence");

    std::map<std::string, std::size_t> df;
    for (const auto& seq : corpus) {
        std::vector<std::string> uniq = seq.tokens;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (auto& t : uniq) ++df[t];
    }

    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [term, count] : df) {
        if (count >= min_df) kept.emplace_back(term, count);
    }
    if (max_features && kept.size() > *max_features) {
        std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        kept.resize(*max_features);
        std::sort(kept.begin(), kept.end());
    }
    if (kept.empty()) throw Error("fit_vocab: empty effective vocabulary");

    std::vector<std::string> terms;
    std::vector<std::size_t> counts;
    for (auto& [term, count] : kept) {
        terms.push_back(term);
        counts.push_back(count);
    }
    return Vocabulary(std::move(terms), std::move(counts), corpus.size());
}

/// Raw in-vocabulary term counts; OOV tokens are ignored.
inline SparseRow encode_counts(const TokenSequence& seq, const Vocabulary& vocab) {
    std::map<std::size_t, double> tally;
    for (const auto& t : seq.tokens) {
        if (auto idx = vocab.index_of(t)) tally[*idx] += 1.0;
    }
    SparseRow row;
    row.reserve(tally.size());
    for (auto [i, v] : tally) row.push_back({i, v});
    return row;
}

/// Smoothed inverse document frequency, ln((1 + N) / (1 + df)) + 1.
class IdfTable {
public:
    IdfTable() = default;
    explicit IdfTable(std::vector<double> weights) : weights_(std::move(weights)) {}

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const { return weights_[i]; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    static double weight(std::size_t n_docs, std::size_t df) {
        return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(df))) + 1.0;
    }

private:
    std::vector<double> weights_;
};

/// Document frequencies are recounted over `corpus` for the vocabulary terms.
inline IdfTable fit_idf(std::span<const TokenSequence> corpus, const Vocabulary& vocab) {
    std::vector<std::size_t> df(vocab.size(), 0);
    std::vector<char> seen(vocab.size(), 0);
    for (const auto& seq : corpus) {
        std::vector<std::size_t> touched;
        for (const auto& t : seq.tokens) {
            if (auto idx = vocab.index_of(t); idx && !seen[*idx]) {
                seen[*idx] = 1;
                touched.push_back(*idx);
            }
        }
        for (auto i : touched) {
            ++df[i];
            seen[i] = 0;
        }
    }
    std::vector<double> w(vocab.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = IdfTable::weight(corpus.size(), df[i]);
    return IdfTable(std::move(w));
}

/// count * idf, then L2-normalized. Rows without in-vocabulary tokens stay zero.
inline SparseRow encode_tfidf(const TokenSequence& seq, const Vocabulary& vocab, const IdfTable& idf) {
    if (idf.size() != vocab.size()) throw Error("encode_tfidf: idf table does not match vocabulary");
    SparseRow row = encode_counts(seq, vocab);
    double norm2 = 0.0;
    for (auto& e : row) {
        e.value *= idf[e.index];
        norm2 += e.value * e.value;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& e : row) e.value *= inv;
    }
    return row;
}

/// Fitted bag-of-words encoder.
struct CountEncoder {
    Vocabulary vocab;

    static CountEncoder fit(std::span<const TokenSequence> train, std::size_t min_df = 1,
                            std::optional<std::size_t> max_features = std::nullopt) {
        return {fit_vocab(train, min_df, max_features)};
    }

    FeatureMatrix transform(std::span<const TokenSequence> seqs) const {
        std::vector<SparseRow> rows;
        rows.reserve(seqs.size());
        for (const auto& s : seqs) rows.push_back(encode_counts(s, vocab));
        return FeatureMatrix::sparse(row_ids_of(seqs), vocab.size(), std::move(rows), "counts");
    }
};

struct TfidfEncoder {
    Vocabulary vocab;
    IdfTable idf;

    static TfidfEncoder fit(std::span<const TokenSequence> train, std::size_t min_df = 1,
                            std::optional<std::size_t> max_features = std::nullopt) {
        TfidfEncoder enc;
        enc.vocab = fit_vocab(train, min_df, max_features);
        enc.idf = fit_idf(train, enc.vocab);
        return enc;
    }

    FeatureMatrix transform(std::span<const TokenSequence> seqs) const {
        std::vector<SparseRow> rows;
        rows.reserve(seqs.size());
        for (const auto& s : seqs) rows.push_back(encode_tfidf(s, vocab, idf));
        return FeatureMatrix::sparse(row_ids_of(seqs), vocab.size(), std::move(rows), "tfidf");
    }
};

/// Horizontal concatenation. Blocks must share row ids in the same order.
/// The result is dense only when every block is dense.
inline FeatureMatrix concat_features(std::span<const FeatureMatrix> blocks) {
    if (blocks.empty()) throw Error("concat_features: no blocks");
    if (blocks.size() == 1) return blocks.front();

    const auto& ids = blocks.front().row_ids();
    std::string name;
    std::size_t width = 0;
    bool all_dense = true;
    for (const auto& b : blocks) {
        if (b.row_ids() != ids) {
            throw Error("concat_features: block \"" + b.encoding_name() + "\" has mismatched row ids");
        }
        if (!name.empty()) name += '+';
        name += b.encoding_name();
        width += b.cols();
        all_dense = all_dense && b.layout() == FeatureMatrix::Layout::dense;
    }

    if (all_dense) {
        std::vector<DenseRow> rows(ids.size());
        for (std::size_t r = 0; r < ids.size(); ++r) {
            rows[r].reserve(width);
            for (const auto& b : blocks) {
                auto part = b.dense_row(r);
                rows[r].insert(rows[r].end(), part.begin(), part.end());
            }
        }
        return FeatureMatrix::dense(ids, width, rows, name);
    }

    std::vector<SparseRow> rows(ids.size());
    for (std::size_t r = 0; r < ids.size(); ++r) {
        std::size_t offset = 0;
        for (const auto& b : blocks) {
            b.for_each_entry(r, [&](std::size_t c, double v) {
                if (v != 0.0) rows[r].push_back({offset + c, v});
            });
            offset += b.cols();
        }
    }
    return FeatureMatrix::sparse(ids, width, std::move(rows), name);
}

}  // namespace climsent
