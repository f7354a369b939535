#include <gtest/gtest.h>

#include "climsent/forest.hpp"
#include "climsent/tree.hpp"
#include "tree_data.hpp"

using namespace climsent;

namespace {

const ClassList kClasses = {"Positive", "Negative", "Neutral"};

double train_accuracy(const TreeModel& t, const treedata::Dataset& d) {
    std::size_t ok = 0;
    for (std::size_t r = 0; r < d.y.size(); ++r) ok += t.predict_row(d.x, r) == d.y[r];
    return static_cast<double>(ok) / static_cast<double>(d.y.size());
}

}  // namespace

TEST(Gini, Examples) {
    EXPECT_DOUBLE_EQ(gini(std::vector<std::size_t>{4}), 0.0);
    EXPECT_DOUBLE_EQ(gini(std::vector<std::size_t>{2, 2}), 0.5);
    EXPECT_DOUBLE_EQ(gini(std::vector<std::size_t>{2, 1, 1}), 0.625);
    EXPECT_THROW(gini(std::vector<std::size_t>{0, 0}), Error);
}

TEST(Gini, Bounds) {
    Rng rng(1);
    for (int i = 0; i < 500; ++i) {
        std::vector<std::size_t> c(2 + rng.uniform_index(4));
        for (auto& v : c) v = rng.uniform_index(6);
        c[0] += 1;
        const double g = gini(c);
        std::size_t nonzero = 0;
        for (auto v : c) nonzero += v > 0;
        ASSERT_GE(g, 0.0);
        ASSERT_LE(g, 1.0 - 1.0 / static_cast<double>(c.size()) + 1e-12);
        ASSERT_EQ(g == 0.0, nonzero == 1);
    }
}

TEST(Tree, SinglePointIsOneLeaf) {
    auto x = FeatureMatrix::dense({"a"}, 2, {{1.0, 2.0}}, "x");
    auto t = train_tree(x, std::vector<std::size_t>{2}, kClasses);
    EXPECT_EQ(t.nodes().size(), 1u);
    EXPECT_EQ(t.predict_row(x, 0), 2u);
}

TEST(Tree, Xor) {
    auto d = treedata::xor_dataset();
    auto t = train_tree(d.x, d.y, {"A", "B"});
    EXPECT_EQ(train_accuracy(t, d), 1.0);
    EXPECT_GE(t.internal_node_count(), 2u);
    // tie at the root goes to the lower feature index
    EXPECT_EQ(t.nodes()[0].feature, 0);
    EXPECT_DOUBLE_EQ(t.nodes()[0].threshold, 0.5);
}

TEST(Tree, ConflictingDuplicatesGiveMajority) {
    auto x = FeatureMatrix::dense({"a", "b", "c"}, 1, {{1.0}, {1.0}, {1.0}}, "x");
    auto t = train_tree(x, std::vector<std::size_t>{1, 1, 0}, kClasses);
    EXPECT_EQ(t.nodes().size(), 1u);
    EXPECT_EQ(t.predict_row(x, 2), 1u);
}

TEST(Tree, MajorityTieGoesToEarliestClass) {
    auto x = FeatureMatrix::dense({"a", "b"}, 1, {{1.0}, {1.0}}, "x");
    auto t = train_tree(x, std::vector<std::size_t>{2, 1}, kClasses);
    EXPECT_EQ(t.predict_row(x, 0), 1u);
}

TEST(Tree, MemorizesSignatureUniqueData) {
    Rng rng(77);
    for (int i = 0; i < 40; ++i) {
        auto d = treedata::random_dataset(rng, true, i % 2 == 1);
        auto t = train_tree(d.x, d.y, kClasses);
        ASSERT_EQ(train_accuracy(t, d), 1.0) << "dataset " << i;
    }
}

TEST(Tree, MaxDepthAndMinSamples) {
    Rng rng(5);
    auto d = treedata::random_dataset(rng, true);
    TreeConfig cfg;
    cfg.max_depth = 2;
    EXPECT_LE(train_tree(d.x, d.y, kClasses, cfg).depth(), 2u);
    cfg.max_depth = 0;
    EXPECT_EQ(train_tree(d.x, d.y, kClasses, cfg).nodes().size(), 1u);
    TreeConfig big;
    big.min_samples_split = 1000;
    EXPECT_EQ(train_tree(d.x, d.y, kClasses, big).nodes().size(), 1u);
}

TEST(Tree, SparseAndDenseAgree) {
    Rng a(9), b(9);
    for (int i = 0; i < 10; ++i) {
        auto dd = treedata::random_dataset(a, false, false);
        auto ds = treedata::random_dataset(b, false, true);
        EXPECT_EQ(train_tree(dd.x, dd.y, kClasses).nodes(), train_tree(ds.x, ds.y, kClasses).nodes());
    }
}

TEST(Forest, OneTreeNoBootstrapEqualsTree) {
    Rng rng(2718);
    for (int i = 0; i < 20; ++i) {
        auto d = treedata::random_dataset(rng, false, i % 2 == 0);
        ForestConfig cfg;
        cfg.n_trees = 1;
        cfg.bootstrap = false;
        cfg.features_per_split = d.x.cols();
        auto f = train_forest(d.x, d.y, kClasses, cfg);
        auto t = train_tree(d.x, d.y, kClasses);
        for (std::size_t r = 0; r < d.y.size(); ++r) ASSERT_EQ(f.predict_row(d.x, r), t.predict_row(d.x, r));
    }
}

TEST(Forest, DeterministicAndThreadIndependent) {
    Rng rng(4);
    auto d = treedata::random_dataset(rng, false);
    ForestConfig cfg;
    cfg.n_trees = 25;
    auto a = train_forest(d.x, d.y, kClasses, cfg);
    cfg.threads = 4;
    auto b = train_forest(d.x, d.y, kClasses, cfg);
    ASSERT_EQ(a.trees().size(), b.trees().size());
    for (std::size_t t = 0; t < a.trees().size(); ++t) EXPECT_EQ(a.trees()[t].nodes(), b.trees()[t].nodes());
    EXPECT_EQ(a.tree_seeds(), b.tree_seeds());
    EXPECT_EQ(a.tree_seeds()[3], cfg.seed + 3);
}

TEST(Forest, FeaturesPerSplitDefault) {
    ForestConfig cfg;
    EXPECT_EQ(resolve_features_per_split(cfg, 100), 10u);
    EXPECT_EQ(resolve_features_per_split(cfg, 101), 11u);
    EXPECT_EQ(resolve_features_per_split(cfg, 1), 1u);
}

TEST(Forest, FloydSampleIsDistinctAndSorted) {
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + rng.uniform_index(50), k = 1 + rng.uniform_index(n);
        auto s = detail::sample_without_replacement(n, k, rng);
        ASSERT_EQ(s.size(), k);
        ASSERT_TRUE(std::is_sorted(s.begin(), s.end()));
        ASSERT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
        ASSERT_LT(s.back(), n);
    }
}
