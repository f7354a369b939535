#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <thread>
#include <unordered_set>
#include <vector>

#include "climsent/error.hpp"
#include "climsent/random.hpp"
#include "climsent/tree.hpp"

namespace climsent {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::optional<std::size_t> features_per_split;  // ceil(sqrt(D)) when empty
    bool bootstrap = true;
    TreeConfig tree;
    std::uint64_t seed = 42;
    std::size_t threads = 1;
};

inline std::size_t resolve_features_per_split(const ForestConfig& config, std::size_t n_features) {
    std::size_t m = config.features_per_split.value_or(
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_features)))));
    return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(n_features, 1));
}

class ForestModel {
public:
    ForestModel() = default;

    ForestModel(ClassList classes, std::size_t n_features, std::vector<TreeModel> trees,
                std::vector<std::uint64_t> tree_seeds, std::size_t features_per_split)
        : classes_(std::move(classes)),
          n_features_(n_features),
          trees_(std::move(trees)),
          tree_seeds_(std::move(tree_seeds)),
          features_per_split_(features_per_split) {
        if (trees_.empty()) throw Error("forest model: no trees");
        for (const auto& t : trees_) {
            if (t.classes() != classes_) throw Error("forest model: trees disagree on the class list");
        }
    }

    const ClassList& classes() const noexcept { return classes_; }
    std::size_t n_features() const noexcept { return n_features_; }
    const std::vector<TreeModel>& trees() const noexcept { return trees_; }
    const std::vector<std::uint64_t>& tree_seeds() const noexcept { return tree_seeds_; }
    std::size_t features_per_split() const noexcept { return features_per_split_; }

    /// Majority vote, ties to the earliest class.
    std::size_t predict_row(const FeatureMatrix& x, std::size_t row) const {
        std::vector<double> votes(classes_.size(), 0.0);
        for (const auto& t : trees_) votes[t.predict_row(x, row)] += 1.0;
        return argmax_first(votes);
    }

private:
    ClassList classes_;
    std::size_t n_features_ = 0;
    std::vector<TreeModel> trees_;
    std::vector<std::uint64_t> tree_seeds_;
    std::size_t features_per_split_ = 0;
};

namespace detail {

/// k distinct values from [0, n) (Floyd's algorithm), sorted ascending.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
    std::unordered_set<std::size_t> chosen;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        const std::size_t t = rng.uniform_index(j + 1);
        const std::size_t pick = chosen.count(t) ? j : t;
        chosen.insert(pick);
        out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Bagged CART trees with per-split feature subsampling. Tree t draws all of
/// its randomness from seed + t, so any thread count gives the same forest.
inline ForestModel train_forest(const FeatureMatrix& x, std::span<const std::size_t> y, const ClassList& classes,
                                const ForestConfig& config = {}) {
    detail::check_training_inputs(x, y, classes.size(), false);
    if (config.n_trees == 0) throw Error("train_forest: n_trees must be >= 1");
    if (config.tree.min_samples_split < 1) throw Error("train_forest: min_samples_split must be >= 1");

    const detail::ColumnStore columns(x);
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const std::size_t mtry = resolve_features_per_split(config, d);
    std::vector<std::size_t> all_features(d);
    std::iota(all_features.begin(), all_features.end(), 0);

    std::vector<TreeModel> trees(config.n_trees);
    std::vector<std::uint64_t> seeds(config.n_trees);
    auto grow_tree = [&](std::size_t t) {
        const std::uint64_t seed = config.seed + t;
        seeds[t] = seed;
        Rng rng(seed);
        std::vector<std::size_t> samples(n);
        if (config.bootstrap) {
            for (auto& s : samples) s = rng.uniform_index(n);
        } else {
            std::iota(samples.begin(), samples.end(), 0);
        }
        detail::CartBuilder builder(columns, y, classes.size(), config.tree);
        auto nodes = builder.build(std::move(samples), [&]() -> std::vector<std::size_t> {
            if (mtry >= d) return all_features;
            return detail::sample_without_replacement(d, mtry, rng);
        });
        trees[t] = TreeModel(classes, d, std::move(nodes));
    };

    const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, config.n_trees);
    if (threads == 1) {
        for (std::size_t t = 0; t < config.n_trees; ++t) grow_tree(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> workers;
            for (std::size_t w = 0; w < threads; ++w) {
                workers.emplace_back([&] {
                    try {
                        for (std::size_t t = next++; t < config.n_trees; t = next++) grow_tree(t);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }
    return ForestModel(classes, d, std::move(trees), std::move(seeds), mtry);
}

}  // namespace climsent
