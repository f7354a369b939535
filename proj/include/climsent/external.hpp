#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "climsent/corpus.hpp"
#include "climsent/error.hpp"
#include "climsent/features.hpp"

namespace climsent {

struct EmbeddingMeta {
    std::string model;
    std::string pooling;
    std::size_t dim = 0;
};

/// Per-document vectors produced outside the workbench (transformer
/// encoders). All vectors share one dimension; ids are unique.
class ExternalEmbeddingSet {
public:
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::optional<EmbeddingMeta>& meta() const noexcept { return meta_; }

    bool contains(const std::string& id) const { return index_.count(id) > 0; }

    std::span<const double> vector(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw Error("external embeddings: unknown id \"" + id + "\"");
        return {flat_.data() + it->second * dim_, dim_};
    }

    /// Parses the interchange JSONL: an optional `{"meta": {...}}` first line,
    /// then one `{"id", "dim", "values"}` object per line.
    static ExternalEmbeddingSet parse(std::string_view text) {
        ExternalEmbeddingSet set;
        std::optional<std::size_t> dim;
        std::size_t line_no = 0;
        std::size_t start = 0;
        bool first_content = true;
        while (start < text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string_view::npos) end = text.size();
            const std::string_view line = detail::trim(text.substr(start, end - start));
            ++line_no;
            start = end + 1;
            if (line.empty()) continue;
            const std::string where = "line " + std::to_string(line_no);

            nlohmann::json obj;
            try {
                obj = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception&) {
                for (std::string_view bad : {"NaN", "nan", "Infinity", "inf"}) {
                    if (line.find(bad) != std::string_view::npos) {
                        throw Error("external embeddings: non-finite value on " + where);
                    }
                }
                throw Error("external embeddings: malformed JSON on " + where);
            }
            if (!obj.is_object()) throw Error("external embeddings: " + where + " is not an object");

            if (first_content && obj.contains("meta")) {
                first_content = false;
                const auto& m = obj["meta"];
                if (!m.is_object() || !m.contains("dim") || !m["dim"].is_number_unsigned()) {
                    throw Error("external embeddings: header on " + where + " needs an integer meta.dim");
                }
                EmbeddingMeta meta;
                meta.dim = m["dim"].get<std::size_t>();
                if (m.contains("model") && m["model"].is_string()) meta.model = m["model"].get<std::string>();
                if (m.contains("pooling") && m["pooling"].is_string()) meta.pooling = m["pooling"].get<std::string>();
                dim = meta.dim;
                set.meta_ = meta;
                continue;
            }
            first_content = false;

            if (!obj.contains("id") || !obj["id"].is_string()) {
                throw Error("external embeddings: " + where + " lacks a string id");
            }
            if (!obj.contains("values") || !obj["values"].is_array()) {
                throw Error("external embeddings: " + where + " lacks a values array");
            }
            const auto id = obj["id"].get<std::string>();
            const auto& values = obj["values"];
            if (obj.contains("dim")) {
                if (!obj["dim"].is_number_unsigned() || obj["dim"].get<std::size_t>() != values.size()) {
                    throw Error("external embeddings: " + where + " declares dim that differs from its values");
                }
            }
            if (!dim) dim = values.size();
            if (values.size() != *dim) {
                throw Error("external embeddings: dimension mismatch on " + where + " (id \"" + id + "\"): got " +
                            std::to_string(values.size()) + ", expected " + std::to_string(*dim));
            }
            if (set.index_.count(id)) throw Error("external embeddings: duplicate id \"" + id + "\" on " + where);
            for (const auto& v : values) {
                if (!v.is_number()) throw Error("external embeddings: non-numeric value on " + where);
                const double x = v.get<double>();
                if (!std::isfinite(x)) throw Error("external embeddings: non-finite value on " + where);
                set.flat_.push_back(x);
            }
            set.index_.emplace(id, set.ids_.size());
            set.ids_.push_back(id);
        }
        if (set.ids_.empty()) throw Error("external embeddings: no vectors");
        set.dim_ = *dim;
        if (set.dim_ == 0) throw Error("external embeddings: zero dimension");
        return set;
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> flat_;
    std::optional<EmbeddingMeta> meta_;
};

inline ExternalEmbeddingSet load_external_embeddings(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
    return ExternalEmbeddingSet::parse(read_file(path));
}

/// Rows in the order of `ids`. Extra ids in the set are ignored; every
/// missing id is listed in the error.
inline FeatureMatrix align_external(const ExternalEmbeddingSet& set, std::span<const std::string> ids,
                                    std::string encoding_name = "external") {
    std::vector<std::string> missing;
    std::vector<DenseRow> rows;
    rows.reserve(ids.size());
    for (const auto& id : ids) {
        if (!set.contains(id)) {
            missing.push_back(id);
            continue;
        }
        auto v = set.vector(id);
        rows.emplace_back(v.begin(), v.end());
    }
    if (!missing.empty()) {
        std::string msg = "external embeddings missing " + std::to_string(missing.size()) + " id(s):";
        for (const auto& id : missing) msg += " " + id;
        throw Error(msg);
    }
    return FeatureMatrix::dense(std::vector<std::string>(ids.begin(), ids.end()), set.dim(), rows,
                                std::move(encoding_name));
}

inline FeatureMatrix align_external(const ExternalEmbeddingSet& set, const LabeledCorpus& corpus,
                                    std::string encoding_name = "external") {
    std::vector<std::string> ids;
    ids.reserve(corpus.size());
    for (const auto& d : corpus) ids.push_back(d.id);
    return align_external(set, ids, std::move(encoding_name));
}

}  // namespace climsent
