#include <gtest/gtest.h>

#include "climsent/random.hpp"
#include "climsent/word2vec.hpp"

using namespace climsent;

namespace {

/// "good" and "great" share contexts; "terrible" lives in a disjoint one.
std::vector<TokenSequence> synonym_corpus() {
    Rng rng(4);
    const std::vector<std::string> pos_ctx = {"sunny", "happy", "bright", "smile", "warm"};
    const std::vector<std::string> neg_ctx = {"storm", "flood", "ruin", "cry", "ash"};
    std::vector<TokenSequence> out;
    for (int i = 0; i < 400; ++i) {
        TokenSequence s{"d" + std::to_string(i), {}};
        const int kind = i % 3;
        const auto& ctx = kind == 2 ? neg_ctx : pos_ctx;
        for (int j = 0; j < 3; ++j) s.tokens.push_back(ctx[rng.uniform_index(ctx.size())]);
        s.tokens.push_back(kind == 0 ? "good" : kind == 1 ? "great" : "terrible");
        for (int j = 0; j < 3; ++j) s.tokens.push_back(ctx[rng.uniform_index(ctx.size())]);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST(Word2Vec, SynonymsCloserThanAntonym) {
    Word2VecParams p;
    p.dim = 32;
    p.epochs = 10;
    auto table = train_word_embeddings(synonym_corpus(), p);
    const double gg = cosine_similarity(table.vector("good"), table.vector("great"));
    const double gt = cosine_similarity(table.vector("good"), table.vector("terrible"));
    EXPECT_GT(gg, gt) << "cos(good,great)=" << gg << " cos(good,terrible)=" << gt;
}

TEST(Word2Vec, ShapeAndDeterminism) {
    Word2VecParams p;
    p.dim = 16;
    p.epochs = 2;
    auto corpus = synonym_corpus();
    auto a = train_word_embeddings(corpus, p);
    auto b = train_word_embeddings(corpus, p);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.dim(), 16u);
    EXPECT_TRUE(std::is_sorted(a.terms().begin(), a.terms().end()));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.vector(i).size(), 16u);
    p.seed = 43;
    EXPECT_FALSE(train_word_embeddings(corpus, p) == a);
}

TEST(Word2Vec, MinCountFiltersRareTerms) {
    Word2VecParams p;
    p.dim = 8;
    p.min_count = 2;
    std::vector<TokenSequence> c{{"a", {"x", "y", "x"}}, {"b", {"x", "z", "y"}}};
    auto t = train_word_embeddings(c, p);
    EXPECT_EQ(t.terms(), (std::vector<std::string>{"x", "y"}));
}

TEST(Word2Vec, EmptyCorpusIsAnError) {
    std::vector<TokenSequence> c{{"a", {}}};
    EXPECT_THROW(train_word_embeddings(c, {}), Error);
}

TEST(MeanEmbedding, Pooling) {
    EmbeddingTable t(2, {"u", "v"}, {1.0, 2.0, 3.0, 6.0});
    EXPECT_EQ(encode_mean_embedding({"d", {"u"}}, t), (DenseRow{1.0, 2.0}));
    EXPECT_EQ(encode_mean_embedding({"d", {}}, t), (DenseRow{0.0, 0.0}));
    EXPECT_EQ(encode_mean_embedding({"d", {"oov"}}, t), (DenseRow{0.0, 0.0}));
    EXPECT_EQ(encode_mean_embedding({"d", {"u", "v"}}, t), (DenseRow{2.0, 4.0}));
    EXPECT_EQ(encode_mean_embedding({"d", {"v", "v", "v"}}, t), (DenseRow{3.0, 6.0}));
}

TEST(MeanEmbedding, EncoderTransformShape) {
    Word2VecParams p;
    p.dim = 8;
    p.epochs = 1;
    auto corpus = synonym_corpus();
    auto enc = Word2VecEncoder::fit(corpus, p);
    auto m = enc.transform(corpus);
    EXPECT_EQ(m.rows(), corpus.size());
    EXPECT_EQ(m.cols(), 8u);
    EXPECT_EQ(m.encoding_name(), "word2vec");
    EXPECT_EQ(m.layout(), FeatureMatrix::Layout::dense);
}
