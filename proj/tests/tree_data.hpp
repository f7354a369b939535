#pragma once

// Random datasets for the tree and forest checks.

#include <set>
#include <string>
#include <vector>

#include "climsent/features.hpp"
#include "climsent/random.hpp"

namespace treedata {

struct Dataset {
    climsent::FeatureMatrix x;
    std::vector<std::size_t> y;
};

/// Small-integer features so that ties and repeated values are common.
/// With `unique_signatures`, duplicate rows are dropped so no two identical
/// rows can carry different labels.
inline Dataset random_dataset(climsent::Rng& rng, bool unique_signatures, bool sparse = false) {
    const std::size_t n = 5 + rng.uniform_index(60);
    const std::size_t d = 1 + rng.uniform_index(8);
    std::set<std::vector<double>> seen;
    std::vector<std::string> ids;
    std::vector<climsent::DenseRow> rows;
    Dataset out;
    for (std::size_t i = 0; i < n; ++i) {
        climsent::DenseRow row(d);
        for (auto& v : row) v = rng.bernoulli(0.3) ? 0.0 : static_cast<double>(rng.uniform_index(5)) - 1.0;
        if (unique_signatures && !seen.insert(row).second) continue;
        ids.push_back("r" + std::to_string(i));
        rows.push_back(row);
        out.y.push_back(rng.uniform_index(3));
    }
    if (sparse) {
        std::vector<climsent::SparseRow> sr;
        for (const auto& r : rows) {
            climsent::SparseRow s;
            for (std::size_t c = 0; c < d; ++c) {
                if (r[c] != 0.0) s.push_back({c, r[c]});
            }
            sr.push_back(std::move(s));
        }
        out.x = climsent::FeatureMatrix::sparse(ids, d, std::move(sr), "rand");
    } else {
        out.x = climsent::FeatureMatrix::dense(ids, d, rows, "rand");
    }
    return out;
}

inline Dataset xor_dataset() {
    return {climsent::FeatureMatrix::dense({"a", "b", "c", "d"}, 2, {{0, 0}, {1, 1}, {0, 1}, {1, 0}}, "xor"),
            {0, 0, 1, 1}};
}

}  // namespace treedata
