#include <gtest/gtest.h>

#include <algorithm>

#include "climsent/eval.hpp"
#include "climsent/random.hpp"
#include "oracles.hpp"

using namespace climsent;

namespace {

const std::vector<std::string> kClasses = {"Positive", "Negative", "Neutral"};

ConfusionMatrix random_matrix(Rng& rng) {
    ConfusionMatrix cm{kClasses, std::vector<std::vector<std::size_t>>(3, std::vector<std::size_t>(3))};
    for (auto& row : cm.counts) {
        for (auto& c : row) c = rng.bernoulli(0.2) ? 0 : rng.uniform_index(50);
    }
    cm.counts[rng.uniform_index(3)][rng.uniform_index(3)] += 1;
    return cm;
}

}  // namespace

TEST(Confusion, Tally) {
    std::vector<std::size_t> t{0, 0, 1, 1, 2}, p{0, 1, 1, 1, 2};
    auto cm = confusion_matrix(t, p, kClasses);
    EXPECT_EQ(cm.counts, (std::vector<std::vector<std::size_t>>{{1, 1, 0}, {0, 2, 0}, {0, 0, 1}}));
    auto id = confusion_matrix(std::vector<std::size_t>{0, 1, 2}, std::vector<std::size_t>{0, 1, 2}, kClasses);
    EXPECT_EQ(id.counts, (std::vector<std::vector<std::size_t>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
    auto empty = confusion_matrix(std::vector<std::size_t>{}, std::vector<std::size_t>{}, kClasses);
    EXPECT_EQ(empty.total(), 0u);
}

TEST(Confusion, Errors) {
    EXPECT_THROW(confusion_matrix(std::vector<std::size_t>{0}, std::vector<std::size_t>{}, kClasses), Error);
    EXPECT_THROW(confusion_matrix(std::vector<std::size_t>{3}, std::vector<std::size_t>{0}, kClasses), Error);
}

TEST(Metrics, FiveDocumentExample) {
    std::vector<std::size_t> t{0, 0, 1, 1, 2}, p{0, 1, 1, 1, 2};
    auto r = metrics(confusion_matrix(t, p, kClasses));
    EXPECT_NEAR(r.accuracy, 0.8, 1e-12);
    EXPECT_NEAR(r.precision, 0.8667, 1e-4);
    EXPECT_NEAR(r.recall, 0.8, 1e-12);
    EXPECT_NEAR(r.f1, 0.7867, 1e-4);
    EXPECT_EQ(r.per_class[0].support, 2u);
    EXPECT_DOUBLE_EQ(r.per_class[1].precision, 2.0 / 3.0);
}

TEST(Metrics, PerfectAndZeroPredicted) {
    auto r = metrics(confusion_matrix(std::vector<std::size_t>{0, 1, 2, 2}, std::vector<std::size_t>{0, 1, 2, 2}, kClasses));
    EXPECT_EQ(r.accuracy, 1.0);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.f1, 1.0);
    auto z = metrics(confusion_matrix(std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{1, 1}, kClasses));
    EXPECT_EQ(z.per_class[0].precision, 0.0);
    EXPECT_EQ(z.per_class[2].f1, 0.0);
}

TEST(Metrics, EmptyMatrixIsAnError) {
    EXPECT_THROW(metrics(confusion_matrix(std::vector<std::size_t>{}, std::vector<std::size_t>{}, kClasses)), Error);
}

TEST(Metrics, MatchOracleAndIdentities) {
    Rng rng(1000);
    for (int i = 0; i < 1000; ++i) {
        auto cm = random_matrix(rng);
        auto r = metrics(cm);
        auto o = oracle::weighted(cm.counts);
        ASSERT_NEAR(r.recall, r.accuracy, 1e-12);
        ASSERT_NEAR(r.accuracy, o.accuracy, 1e-12);
        ASSERT_NEAR(r.precision, o.precision, 1e-12);
        ASSERT_NEAR(r.f1, o.f1, 1e-12);
        double pmin = 1, pmax = 0, fmin = 1, fmax = 0;
        for (const auto& c : r.per_class) {
            ASSERT_LE(c.f1, std::max(c.precision, c.recall) + 1e-12);
            if (c.support == 0) continue;
            pmin = std::min(pmin, c.precision);
            pmax = std::max(pmax, c.precision);
            fmin = std::min(fmin, c.f1);
            fmax = std::max(fmax, c.f1);
        }
        ASSERT_GE(r.precision, pmin - 1e-12);
        ASSERT_LE(r.precision, pmax + 1e-12);
        ASSERT_GE(r.f1, fmin - 1e-12);
        ASSERT_LE(r.f1, fmax + 1e-12);
    }
}

TEST(Metrics, ClassPermutationInvariance) {
    Rng rng(55);
    std::vector<std::size_t> perm{2, 0, 1};
    for (int i = 0; i < 200; ++i) {
        auto cm = random_matrix(rng);
        ConfusionMatrix pm{{kClasses[perm[0]], kClasses[perm[1]], kClasses[perm[2]]},
                           std::vector<std::vector<std::size_t>>(3, std::vector<std::size_t>(3))};
        for (std::size_t a = 0; a < 3; ++a) {
            for (std::size_t b = 0; b < 3; ++b) pm.counts[a][b] = cm.counts[perm[a]][perm[b]];
        }
        auto r = metrics(cm), q = metrics(pm);
        ASSERT_NEAR(r.accuracy, q.accuracy, 1e-12);
        ASSERT_NEAR(r.precision, q.precision, 1e-12);
        ASSERT_NEAR(r.recall, q.recall, 1e-12);
        ASSERT_NEAR(r.f1, q.f1, 1e-12);
        for (std::size_t a = 0; a < 3; ++a) ASSERT_EQ(q.per_class[a].label, r.per_class[perm[a]].label);
    }
}

TEST(Format, RowRendering) {
    EvalReport r;
    r.encoder = "external:climatebert.jsonl";
    r.model = "rf";
    r.accuracy = 0.8522;
    r.precision = 0.86;
    r.recall = 0.8522;
    r.f1 = 0.85;
    auto out = format_results(std::vector<EvalReport>{r});
    EXPECT_NE(out.text.find("Encoder: external:climatebert.jsonl\n"), std::string::npos) << out.text;
    EXPECT_NE(out.text.find("\nRF           85.22      86.00     85.22      85.00\n"), std::string::npos) << out.text;
    EXPECT_EQ(out.csv, "encoder,model,accuracy,precision,recall,f1\nexternal:climatebert.jsonl,rf,0.852200,0.860000,0.852200,0.850000\n");
}

TEST(Format, EmptyInput) {
    auto out = format_results(std::vector<EvalReport>{});
    EXPECT_EQ(out.csv, "encoder,model,accuracy,precision,recall,f1\n");
    EXPECT_EQ(out.text, "");
}

TEST(Format, TablesInEncoderOrderRowsInModelOrder) {
    std::vector<EvalReport> reps;
    for (std::string enc : {"tfidf", "counts"}) {
        for (std::string m : {"lr", "dt", "rf", "svm"}) {
            EvalReport r;
            r.encoder = enc;
            r.model = m;
            reps.push_back(r);
        }
    }
    auto out = format_results(reps);
    const auto counts_at = out.text.find("Encoder: counts"), tfidf_at = out.text.find("Encoder: tfidf");
    ASSERT_NE(counts_at, std::string::npos);
    ASSERT_LT(counts_at, tfidf_at);
    const auto rf = out.text.find("\nRF "), svm = out.text.find("\nSVM "), dt = out.text.find("\nDT "),
               lr = out.text.find("\nLR ");
    EXPECT_LT(rf, svm);
    EXPECT_LT(svm, dt);
    EXPECT_LT(dt, lr);
    // csv keeps input order
    EXPECT_EQ(out.csv.substr(out.csv.find('\n') + 1, 9), "tfidf,lr,");
}
