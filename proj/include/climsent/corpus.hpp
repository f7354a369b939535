#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "climsent/csv.hpp"
#include "climsent/error.hpp"
#include "climsent/random.hpp"

namespace climsent {

/// Class order is Positive < Negative < Neutral. Every tie-break in the
/// library resolves by this order.
enum class SentimentLabel : std::uint8_t { Positive = 0, Negative = 1, Neutral = 2 };

inline constexpr std::array<SentimentLabel, 3> kAllLabels = {
    SentimentLabel::Positive, SentimentLabel::Negative, SentimentLabel::Neutral};

inline constexpr std::size_t kNumLabels = kAllLabels.size();

inline std::string_view to_string(SentimentLabel label) noexcept {
    switch (label) {
        case SentimentLabel::Positive: return "Positive";
        case SentimentLabel::Negative: return "Negative";
        case SentimentLabel::Neutral: return "Neutral";
    }
    return "?";
}

inline std::size_t label_index(SentimentLabel label) noexcept {
    return static_cast<std::size_t>(label);
}

inline std::vector<std::string> label_names() {
    std::vector<std::string> names;
    for (auto l : kAllLabels) names.emplace_back(to_string(l));
    return names;
}

namespace detail {

inline bool is_ascii_space(char c) noexcept {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && is_ascii_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ascii_space(s.back())) s.remove_suffix(1);
    return s;
}

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace detail

/// Trim + case-insensitive match against the three label names.
inline SentimentLabel parse_label(std::string_view raw) {
    const std::string norm = detail::ascii_lower(detail::trim(raw));
    for (auto l : kAllLabels) {
        if (norm == detail::ascii_lower(to_string(l))) return l;
    }
    throw Error("unknown label: \"" + std::string(raw) + "\"");
}

struct Document {
    std::string id;
    std::string text;
    SentimentLabel label = SentimentLabel::Positive;

    friend bool operator==(const Document&, const Document&) = default;
};

/// An ordered, validated collection of documents. Immutable once built.
class LabeledCorpus {
public:
    LabeledCorpus() = default;

    explicit LabeledCorpus(std::vector<Document> documents, std::string provenance = {})
        : documents_(std::move(documents)), provenance_(std::move(provenance)) {
        std::unordered_set<std::string_view> seen;
        seen.reserve(documents_.size());
        for (std::size_t i = 0; i < documents_.size(); ++i) {
            const auto& doc = documents_[i];
            if (doc.id.empty()) {
                throw Error("document " + std::to_string(i + 1) + " has an empty id");
            }
            if (detail::trim(doc.text).empty()) {
                throw Error("document \"" + doc.id + "\" has empty text");
            }
            if (!seen.insert(doc.id).second) {
                throw Error("duplicate id: \"" + doc.id + "\"");
            }
        }
    }

    const std::vector<Document>& documents() const noexcept { return documents_; }
    const std::string& provenance() const noexcept { return provenance_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }
    const Document& operator[](std::size_t i) const { return documents_[i]; }

    auto begin() const noexcept { return documents_.begin(); }
    auto end() const noexcept { return documents_.end(); }

    /// Equality ignores provenance.
    friend bool operator==(const LabeledCorpus& a, const LabeledCorpus& b) {
        return a.documents_ == b.documents_;
    }

private:
    std::vector<Document> documents_;
    std::string provenance_;
};

enum class CorpusFormat { csv, jsonl };

inline CorpusFormat parse_corpus_format(std::string_view name) {
    const std::string n = detail::ascii_lower(detail::trim(name));
    if (n == "csv") return CorpusFormat::csv;
    if (n == "jsonl") return CorpusFormat::jsonl;
    throw Error("unknown corpus format: \"" + std::string(name) + "\" (expected csv or jsonl)");
}

inline std::string_view to_string(CorpusFormat f) noexcept {
    return f == CorpusFormat::csv ? "csv" : "jsonl";
}

/// Parses CSV text with a `content,label` header (case-insensitive, extra
/// columns ignored). Row n (1-based, excluding the header) gets id `row-<n>`.
inline LabeledCorpus parse_csv_corpus(std::string_view text, std::string provenance = {}) {
    std::vector<csv::Record> records;
    try {
        records = csv::parse(text);
    } catch (const Error& e) {
        throw Error(std::string("malformed csv: ") + e.what());
    }
    if (records.empty()) throw Error("empty corpus");

    const auto& header = records.front().fields;
    std::optional<std::size_t> content_col, label_col;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string name = detail::ascii_lower(detail::trim(header[c]));
        if (name == "content" && !content_col) content_col = c;
        if (name == "label" && !label_col) label_col = c;
    }
    if (!content_col || !label_col) {
        throw Error("csv header must contain columns content,label");
    }
    if (records.size() == 1) throw Error("empty corpus");

    std::vector<Document> docs;
    docs.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string where = "row " + std::to_string(r) + " (line " + std::to_string(rec.line) + ")";
        if (rec.fields.size() != header.size()) {
            throw Error("malformed " + where + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(rec.fields.size()));
        }
        Document doc;
        doc.id = "row-" + std::to_string(r);
        doc.text = rec.fields[*content_col];
        if (detail::trim(doc.text).empty()) throw Error("malformed " + where + ": empty content");
        try {
            doc.label = parse_label(rec.fields[*label_col]);
        } catch (const Error& e) {
            throw Error(where + ": " + e.what());
        }
        docs.push_back(std::move(doc));
    }
    return LabeledCorpus(std::move(docs), std::move(provenance));
}

/// One object per line with string fields `id`, `content`, `label`. Blank
/// lines are skipped.
inline LabeledCorpus parse_jsonl_corpus(std::string_view text, std::string provenance = {}) {
    std::vector<Document> docs;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (detail::trim(line).empty()) {
            if (end == text.size()) break;
            continue;
        }
        const std::string where = "line " + std::to_string(line_no);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("malformed " + where + ": " + e.what());
        }
        if (!obj.is_object()) throw Error("malformed " + where + ": not a JSON object");
        for (const char* key : {"id", "content", "label"}) {
            if (!obj.contains(key) || !obj[key].is_string()) {
                throw Error("malformed " + where + ": missing string field \"" + key + "\"");
            }
        }
        Document doc;
        doc.id = obj["id"].get<std::string>();
        doc.text = obj["content"].get<std::string>();
        if (doc.id.empty()) throw Error("malformed " + where + ": empty id");
        if (detail::trim(doc.text).empty()) throw Error("malformed " + where + ": empty content");
        try {
            doc.label = parse_label(obj["label"].get<std::string>());
        } catch (const Error& e) {
            throw Error(where + ": " + e.what());
        }
        docs.push_back(std::move(doc));
        if (end == text.size()) break;
    }
    if (docs.empty()) throw Error("empty corpus");
    return LabeledCorpus(std::move(docs), std::move(provenance));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LabeledCorpus parse_corpus(std::string_view text, CorpusFormat format, std::string provenance = {}) {
    return format == CorpusFormat::csv ? parse_csv_corpus(text, std::move(provenance))
                                       : parse_jsonl_corpus(text, std::move(provenance));
}

inline LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
    return parse_corpus(read_file(path), format, path.string());
}

/// CSV output drops ids (they are re-synthesized on load); use JSONL to
/// keep them.
inline std::string serialize_corpus(const LabeledCorpus& corpus, CorpusFormat format) {
    std::string out;
    if (format == CorpusFormat::csv) {
        out = "content,label\n";
        for (const auto& d : corpus) {
            out += csv::escape_field(d.text);
            out += ',';
            out += to_string(d.label);
            out += '\n';
        }
    } else {
        for (const auto& d : corpus) {
            nlohmann::json obj = {{"id", d.id}, {"content", d.text}, {"label", to_string(d.label)}};
            out += obj.dump();
            out += '\n';
        }
    }
    return out;
}

inline void save_corpus(const LabeledCorpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << serialize_corpus(corpus, format);
}

using ClassCounts = std::map<SentimentLabel, std::size_t>;

/// Always holds all three labels; absent classes count 0.
inline ClassCounts class_distribution(const LabeledCorpus& corpus) {
    ClassCounts counts;
    for (auto l : kAllLabels) counts[l] = 0;
    for (const auto& d : corpus) ++counts[d.label];
    return counts;
}

struct CorpusSplit {
    LabeledCorpus train;
    LabeledCorpus test;
};

/// Per-class test quotas: total round(N * fraction), distributed by the
/// largest-remainder rule over the exact quotas n_c * total / N. Remainder
/// ties go to the earlier class.
inline std::array<std::size_t, kNumLabels> stratified_test_quotas(const ClassCounts& counts,
                                                                 double test_fraction) {
    std::size_t n = 0;
    for (const auto& [label, c] : counts) n += c;
    const auto total = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));

    std::array<std::size_t, kNumLabels> quota{};
    std::array<double, kNumLabels> remainder{};
    std::size_t assigned = 0;
    for (auto l : kAllLabels) {
        const std::size_t c = counts.count(l) ? counts.at(l) : 0;
        const double exact = n == 0 ? 0.0 : static_cast<double>(c) * static_cast<double>(total) / static_cast<double>(n);
        quota[label_index(l)] = static_cast<std::size_t>(std::floor(exact));
        remainder[label_index(l)] = exact - std::floor(exact);
        assigned += quota[label_index(l)];
    }
    while (assigned < total) {
        std::size_t best = kNumLabels;
        for (std::size_t k = 0; k < kNumLabels; ++k) {
            const std::size_t c = counts.count(kAllLabels[k]) ? counts.at(kAllLabels[k]) : 0;
            if (quota[k] >= c) continue;
            if (best == kNumLabels || remainder[k] > remainder[best]) best = k;
        }
        if (best == kNumLabels) break;
        ++quota[best];
        remainder[best] = -1.0;
        ++assigned;
    }
    return quota;
}

/// Seeded stratified train/test partition. Both halves keep corpus order.
inline CorpusSplit stratified_split(const LabeledCorpus& corpus, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error("test_fraction must lie in (0,1), got " + std::to_string(test_fraction));
    }
    const auto counts = class_distribution(corpus);
    const auto quota = stratified_test_quotas(counts, test_fraction);

    std::array<std::vector<std::size_t>, kNumLabels> members;
    for (std::size_t i = 0; i < corpus.size(); ++i) members[label_index(corpus[i].label)].push_back(i);

    std::vector<bool> in_test(corpus.size(), false);
    for (std::size_t k = 0; k < kNumLabels; ++k) {
        Rng rng(derive_seed(seed, std::string("split/") + std::string(to_string(kAllLabels[k]))));
        auto pool = members[k];
        rng.shuffle(pool);
        for (std::size_t j = 0; j < quota[k]; ++j) in_test[pool[j]] = true;
    }

    std::vector<Document> train, test;
    for (std::size_t i = 0; i < corpus.size(); ++i) (in_test[i] ? test : train).push_back(corpus[i]);
    return {LabeledCorpus(std::move(train), corpus.provenance() + " [train]"),
            LabeledCorpus(std::move(test), corpus.provenance() + " [test]")};
}

namespace detail {

inline std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_ascii_space(text[i])) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_ascii_space(text[j])) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

/// Random deletion (each token with probability `p_delete`, at least one
/// token survives) followed by one random adjacent swap.
inline std::string perturb_tokens(std::string_view text, double p_delete, Rng& rng) {
    const auto tokens = split_whitespace(text);
    std::vector<std::string> kept;
    for (const auto& t : tokens) {
        if (!rng.bernoulli(p_delete)) kept.push_back(t);
    }
    if (kept.empty() && !tokens.empty()) kept.push_back(tokens[rng.uniform_index(tokens.size())]);
    if (kept.size() >= 2) {
        const std::size_t i = rng.uniform_index(kept.size() - 1);
        std::swap(kept[i], kept[i + 1]);
    }
    std::string out;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        if (i) out += ' ';
        out += kept[i];
    }
    return out;
}

}  // namespace detail

/// Grows every present class below `target_per_class` to exactly that count by
/// appending perturbed copies of uniformly drawn same-class originals.
/// Originals are kept verbatim and in place; synthetic documents follow in
/// class order, with ids `<origin-id>-aug-<k>` (k counts per origin from 1).
inline LabeledCorpus augment(const LabeledCorpus& corpus, std::size_t target_per_class, std::uint64_t seed) {
    if (corpus.empty()) throw Error("cannot augment an empty corpus");
    const auto counts = class_distribution(corpus);
    std::array<std::vector<std::size_t>, kNumLabels> members;
    for (std::size_t i = 0; i < corpus.size(); ++i) members[label_index(corpus[i].label)].push_back(i);

    std::vector<Document> docs = corpus.documents();
    std::unordered_set<std::string> ids;
    for (const auto& d : docs) ids.insert(d.id);
    std::unordered_map<std::string, std::size_t> per_origin;

    for (auto label : kAllLabels) {
        const std::size_t have = counts.at(label);
        if (have >= target_per_class) continue;
        const auto& pool = members[label_index(label)];
        if (pool.empty()) continue;  // nothing to copy from; the class stays absent
        Rng rng(derive_seed(seed, std::string("augment/") + std::string(to_string(label))));
        for (std::size_t made = have; made < target_per_class; ++made) {
            const Document& origin = corpus[pool[rng.uniform_index(pool.size())]];
            Document synth;
            synth.label = label;
            synth.text = detail::perturb_tokens(origin.text, 0.1, rng);
            std::size_t& k = per_origin[origin.id];
            do {
                synth.id = origin.id + "-aug-" + std::to_string(++k);
            } while (ids.count(synth.id));
            ids.insert(synth.id);
            docs.push_back(std::move(synth));
        }
    }
    if (docs.size() == corpus.size()) return corpus;
    return LabeledCorpus(std::move(docs), corpus.provenance() + " [augmented]");
}

}  // namespace climsent
