#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "climsent/error.hpp"
#include "climsent/features.hpp"
#include "climsent/linear.hpp"

namespace climsent {

/// 1 - sum (n_i / n)^2.
inline double gini(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw Error("gini: empty count vector");
    double sum_sq = 0.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct TreeConfig {
    std::optional<std::size_t> max_depth;  // unlimited when empty
    std::size_t min_samples_split = 2;
};

struct TreeNode {
    std::int64_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when value <= threshold
    std::int64_t left = -1;
    std::int64_t right = -1;
    std::vector<std::size_t> class_counts;
    std::size_t prediction = 0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// CART classification tree stored as a flat node array; node 0 is the root.
class TreeModel {
public:
    TreeModel() = default;

    TreeModel(ClassList classes, std::size_t n_features, std::vector<TreeNode> nodes)
        : classes_(std::move(classes)), n_features_(n_features), nodes_(std::move(nodes)) {
        if (nodes_.empty()) throw Error("tree model: no nodes");
        for (const auto& nd : nodes_) {
            if (nd.is_leaf()) continue;
            const auto n = static_cast<std::int64_t>(nodes_.size());
            if (nd.left <= 0 || nd.right <= 0 || nd.left >= n || nd.right >= n ||
                static_cast<std::size_t>(nd.feature) >= n_features_ || !std::isfinite(nd.threshold)) {
                throw Error("tree model: malformed split node");
            }
        }
    }

    const ClassList& classes() const noexcept { return classes_; }
    std::size_t n_features() const noexcept { return n_features_; }
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

    const TreeNode& leaf_for(const FeatureMatrix& x, std::size_t row) const {
        const TreeNode* nd = &nodes_.front();
        while (!nd->is_leaf()) {
            const double v = x.at(row, static_cast<std::size_t>(nd->feature));
            nd = &nodes_[static_cast<std::size_t>(v <= nd->threshold ? nd->left : nd->right)];
        }
        return *nd;
    }

    std::size_t predict_row(const FeatureMatrix& x, std::size_t row) const { return leaf_for(x, row).prediction; }

    std::size_t depth() const {
        std::size_t best = 0;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
        while (!stack.empty()) {
            auto [i, d] = stack.back();
            stack.pop_back();
            best = std::max(best, d);
            if (!nodes_[i].is_leaf()) {
                stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
                stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
            }
        }
        return best;
    }

    std::size_t internal_node_count() const {
        return static_cast<std::size_t>(
            std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
    }

private:
    ClassList classes_;
    std::size_t n_features_ = 0;
    std::vector<TreeNode> nodes_;
};

namespace detail {

/// Column-major copy of the nonzero entries of a feature matrix, shared by
/// every tree grown on the same data.
class ColumnStore {
public:
    struct Entry {
        std::size_t row;
        double value;
    };

    explicit ColumnStore(const FeatureMatrix& x) : rows_(x.rows()), columns_(x.cols()) {
        for (std::size_t r = 0; r < x.rows(); ++r) {
            x.for_each_entry(r, [&](std::size_t c, double v) {
                if (v != 0.0) columns_[c].push_back({r, v});
            });
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return columns_.size(); }
    const std::vector<Entry>& column(std::size_t c) const { return columns_[c]; }

private:
    std::size_t rows_;
    std::vector<std::vector<Entry>> columns_;
};

/// Chooses the candidate features for one split, in ascending index order.
using FeatureSampler = std::function<std::vector<std::size_t>()>;

class CartBuilder {
public:
    CartBuilder(const ColumnStore& columns, std::span<const std::size_t> y, std::size_t n_classes,
                const TreeConfig& config)
        : columns_(columns), y_(y), n_classes_(n_classes), config_(config), scratch_(columns.rows(), 0.0) {}

    /// `samples` are row indices and may repeat (bootstrap draws).
    std::vector<TreeNode> build(std::vector<std::size_t> samples, const FeatureSampler& sample_features) {
        nodes_.clear();
        grow(std::move(samples), 0, sample_features);
        return std::move(nodes_);
    }

private:
    struct Split {
        std::size_t feature = 0;
        double threshold = 0.0;
        double impurity = 0.0;
    };

    std::size_t grow(std::vector<std::size_t> samples, std::size_t depth, const FeatureSampler& sample_features) {
        const std::size_t id = nodes_.size();
        nodes_.emplace_back();
        TreeNode node;
        node.class_counts.assign(n_classes_, 0);
        for (auto r : samples) ++node.class_counts[y_[r]];
        node.prediction = static_cast<std::size_t>(
            std::max_element(node.class_counts.begin(), node.class_counts.end()) - node.class_counts.begin());

        const double parent = gini(node.class_counts);
        const bool stop = parent == 0.0 || (config_.max_depth && depth >= *config_.max_depth) ||
                          samples.size() < config_.min_samples_split;
        std::optional<Split> best;
        if (!stop) best = best_split(samples, sample_features());
        // A zero-gain split is still taken (XOR needs one); weighted child
        // Gini never exceeds the parent's, so this only stops on constant features.
        if (!best || best->impurity > parent + 1e-12) {
            nodes_[id] = std::move(node);
            return id;
        }

        fill_scratch(best->feature);
        std::vector<std::size_t> left, right;
        for (auto r : samples) (scratch_[r] <= best->threshold ? left : right).push_back(r);
        clear_scratch(best->feature);
        samples.clear();
        samples.shrink_to_fit();

        node.feature = static_cast<std::int64_t>(best->feature);
        node.threshold = best->threshold;
        const std::size_t l = grow(std::move(left), depth + 1, sample_features);
        const std::size_t r = grow(std::move(right), depth + 1, sample_features);
        node.left = static_cast<std::int64_t>(l);
        node.right = static_cast<std::int64_t>(r);
        nodes_[id] = std::move(node);
        return id;
    }

    void fill_scratch(std::size_t f) {
        for (const auto& e : columns_.column(f)) scratch_[e.row] = e.value;
    }
    void clear_scratch(std::size_t f) {
        for (const auto& e : columns_.column(f)) scratch_[e.row] = 0.0;
    }

    /// Lowest weighted child Gini over midpoints between consecutive distinct
    /// values. Earlier (feature, threshold) pairs win ties.
    std::optional<Split> best_split(const std::vector<std::size_t>& samples, const std::vector<std::size_t>& features) {
        std::optional<Split> best;
        const auto n = static_cast<double>(samples.size());
        std::vector<std::pair<double, std::size_t>> vals(samples.size());
        std::vector<std::size_t> total(n_classes_, 0);
        for (auto r : samples) ++total[y_[r]];
        std::vector<std::size_t> left(n_classes_);

        for (auto f : features) {
            fill_scratch(f);
            for (std::size_t i = 0; i < samples.size(); ++i) vals[i] = {scratch_[samples[i]], y_[samples[i]]};
            clear_scratch(f);
            std::sort(vals.begin(), vals.end());
            if (vals.front().first == vals.back().first) continue;

            std::fill(left.begin(), left.end(), 0);
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                ++left[vals[i].second];
                if (!(vals[i].first < vals[i + 1].first)) continue;
                const auto nl = static_cast<double>(i + 1);
                const double nr = n - nl;
                double sq_l = 0.0, sq_r = 0.0;
                for (std::size_t k = 0; k < n_classes_; ++k) {
                    const auto cl = static_cast<double>(left[k]);
                    const auto cr = static_cast<double>(total[k] - left[k]);
                    sq_l += cl * cl;
                    sq_r += cr * cr;
                }
                const double impurity = (nl - sq_l / nl + nr - sq_r / nr) / n;
                if (!best || impurity < best->impurity - 1e-12) {
                    const double a = vals[i].first, b = vals[i + 1].first;
                    double mid = a + (b - a) / 2.0;
                    if (!(mid < b)) mid = a;
                    best = Split{f, mid, impurity};
                }
            }
        }
        return best;
    }

    const ColumnStore& columns_;
    std::span<const std::size_t> y_;
    std::size_t n_classes_;
    TreeConfig config_;
    std::vector<double> scratch_;
    std::vector<TreeNode> nodes_;
};

}  // namespace detail

/// CART over every feature at every node. Leaves predict the majority class,
/// ties to the earliest class.
inline TreeModel train_tree(const FeatureMatrix& x, std::span<const std::size_t> y, const ClassList& classes,
                            const TreeConfig& config = {}) {
    detail::check_training_inputs(x, y, classes.size(), false);
    if (config.min_samples_split < 1) throw Error("train_tree: min_samples_split must be >= 1");
    detail::ColumnStore columns(x);
    std::vector<std::size_t> all_features(x.cols());
    std::iota(all_features.begin(), all_features.end(), 0);
    std::vector<std::size_t> samples(x.rows());
    std::iota(samples.begin(), samples.end(), 0);
    detail::CartBuilder builder(columns, y, classes.size(), config);
    auto nodes = builder.build(std::move(samples), [&] { return all_features; });
    return TreeModel(classes, x.cols(), std::move(nodes));
}

}  // namespace climsent
