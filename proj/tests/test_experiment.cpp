#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "climsent/experiment.hpp"
#include "climsent/synthetic.hpp"
#include "test_util.hpp"

using namespace climsent;

namespace {

LabeledCorpus small_corpus() {
    SyntheticCorpusSpec spec;
    spec.documents = 150;
    return generate_synthetic_corpus(spec);
}

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.corpus_path = "in-memory.csv";
    cfg.encoders = {"tfidf"};
    cfg.models = {ModelKind::lr, ModelKind::rf};
    cfg.hyperparameters.rf.n_trees = 15;
    cfg.hyperparameters.lr.epochs = 100;
    return cfg;
}

ExperimentResult run(const ExperimentConfig& cfg, const LabeledCorpus& corpus) {
    const auto bytes = serialize_corpus(corpus, CorpusFormat::csv);
    return run_experiment(cfg, corpus, bytes);
}

std::size_t csv_rows(const std::string& csv) { return static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1; }

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

std::vector<std::string> config_errors(const std::string& json, const std::filesystem::path& dir) {
    auto parsed = nlohmann::json::parse(json, nullptr, true, true);
    return parse_config(parsed, dir).errors;
}

}  // namespace

TEST(Experiment, GridSizeAndNames) {
    auto res = run(base_config(), small_corpus());
    EXPECT_TRUE(res.failures.empty());
    ASSERT_EQ(res.reports.size(), 2u);
    EXPECT_EQ(csv_rows(res.results_csv), 2u);
    EXPECT_EQ(res.reports[0].model, "lr");
    EXPECT_EQ(res.reports[1].model, "rf");
    EXPECT_EQ(res.exit_code(), 0);
}

TEST(Experiment, ConcatenatedEncoderFeedsEveryModel) {
    auto cfg = base_config();
    cfg.encoders = {"tfidf+counts", "counts"};
    cfg.models = {ModelKind::lr, ModelKind::dt, ModelKind::svm};
    auto res = run(cfg, small_corpus());
    ASSERT_EQ(res.reports.size(), 6u);
    EXPECT_EQ(res.reports[0].encoder, "tfidf+counts");
    EXPECT_EQ(res.reports[5].encoder, "counts");
    EXPECT_NE(res.tables_text.find("Encoder: tfidf+counts"), std::string::npos);
}

TEST(Experiment, ByteIdenticalAcrossRunsAndThreadCounts) {
    auto cfg = base_config();
    cfg.encoders = {"counts", "word2vec", "tfidf+word2vec"};
    cfg.word2vec.dim = 16;
    cfg.word2vec.epochs = 2;
    const auto corpus = small_corpus();
    auto a = run(cfg, corpus);
    auto b = run(cfg, corpus);
    cfg.threads = 4;
    auto c = run(cfg, corpus);
    EXPECT_EQ(a.results_csv, b.results_csv);
    EXPECT_EQ(a.results_csv, c.results_csv);
    EXPECT_EQ(a.tables_text, c.tables_text);
    EXPECT_EQ(a.manifest["seeds"], c.manifest["seeds"]);
}

TEST(Experiment, SeedChangesTheSplit) {
    auto cfg = base_config();
    const auto corpus = small_corpus();
    auto a = prepare_splits(corpus, cfg);
    cfg.seed = 7;
    auto b = prepare_splits(corpus, cfg);
    EXPECT_FALSE(a.test == b.test);
}

TEST(Experiment, TestOnlySentinelNeverFitted) {
    auto cfg = base_config();
    cfg.encoders = {"counts", "tfidf", "word2vec"};
    cfg.models = {ModelKind::lr};
    cfg.word2vec.dim = 8;
    cfg.word2vec.epochs = 1;
    const auto corpus = small_corpus();
    const auto splits = prepare_splits(corpus, cfg);
    std::set<std::string> test_ids;
    for (const auto& d : splits.test) test_ids.insert(d.id);

    std::vector<Document> docs;
    for (const auto& d : corpus) {
        docs.push_back(d);
        if (test_ids.count(d.id)) docs.back().text += " zqxsentinel";
    }
    const LabeledCorpus marked(std::move(docs));
    // text edits must not move documents between halves
    const auto again = prepare_splits(marked, cfg);
    std::set<std::string> again_ids;
    for (const auto& d : again.test) again_ids.insert(d.id);
    ASSERT_EQ(again_ids, test_ids);

    auto res = run(cfg, marked);
    ASSERT_EQ(res.fitted_vocabularies.size(), 3u);
    for (const auto& [enc, vocab] : res.fitted_vocabularies) {
        EXPECT_FALSE(contains(vocab, "zqxsentinel")) << enc;
        EXPECT_FALSE(vocab.empty()) << enc;
    }
}

TEST(Experiment, AugmentBeforeAndAfterSplit) {
    SyntheticCorpusSpec spec;
    spec.documents = 100;
    const auto corpus = generate_synthetic_corpus(spec);
    auto cfg = base_config();
    cfg.augment_target = 45;
    auto before = prepare_splits(corpus, cfg);
    EXPECT_EQ(before.train.size() + before.test.size(), 135u);
    cfg.augment_after_split = true;
    auto after = prepare_splits(corpus, cfg);
    EXPECT_EQ(after.test.size(), 20u);
    for (const auto& d : after.test) EXPECT_EQ(d.id.find("-aug-"), std::string::npos);
    for (auto [label, n] : class_distribution(after.train)) EXPECT_GE(n, 45u);
}

TEST(Experiment, FailedCellsAreReportedAndOthersRun) {
    const auto corpus = load_corpus(testutil::data_path("mini.csv"), CorpusFormat::csv);
    auto cfg = base_config();
    cfg.test_fraction = 0.25;
    cfg.encoders = {"counts", "external:emb_missing.jsonl"};
    cfg.external_paths["external:emb_missing.jsonl"] = testutil::data_path("emb_missing.jsonl");
    cfg.models = {ModelKind::lr, ModelKind::dt};
    auto res = run(cfg, corpus);
    EXPECT_EQ(res.reports.size(), 2u);
    ASSERT_EQ(res.failures.size(), 2u);
    EXPECT_EQ(res.failures[0].encoder, "external:emb_missing.jsonl");
    EXPECT_EQ(res.failures[0].stage, "features");
    EXPECT_NE(res.failures[0].message.find("row-1"), std::string::npos);
    EXPECT_EQ(res.exit_code(), 2);
    EXPECT_EQ(res.manifest["failures"].size(), 2u);
    EXPECT_EQ(csv_rows(res.results_csv), 2u);
}

TEST(Experiment, ExternalEncoderWithFixture) {
    const auto corpus = load_corpus(testutil::data_path("mini.csv"), CorpusFormat::csv);
    auto cfg = base_config();
    cfg.test_fraction = 0.25;
    cfg.encoders = {"external:emb_mini.jsonl", "tfidf+external:emb_mini.jsonl"};
    cfg.external_paths["external:emb_mini.jsonl"] = testutil::data_path("emb_mini.jsonl");
    auto res = run(cfg, corpus);
    EXPECT_TRUE(res.failures.empty()) << (res.failures.empty() ? "" : res.failures[0].message);
    EXPECT_EQ(res.reports.size(), 4u);
}

TEST(Experiment, ManifestContents) {
    const auto corpus = small_corpus();
    const auto bytes = serialize_corpus(corpus, CorpusFormat::csv);
    auto cfg = base_config();
    auto res = run_experiment(cfg, corpus, bytes);
    const auto& m = res.manifest;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    EXPECT_EQ(m["corpus"]["checksum"], std::string("fnv1a64:") + hex);
    EXPECT_EQ(m["corpus"]["documents"], corpus.size());
    EXPECT_EQ(m["seeds"]["master"], 42u);
    EXPECT_EQ(m["seeds"]["cells"]["tfidf/lr"], cell_seed(42, "tfidf", ModelKind::lr));
    EXPECT_TRUE(m["timings_ms"].contains("preprocess"));
    EXPECT_TRUE(m["timings_ms"]["cells"].contains("tfidf/rf"));
    EXPECT_EQ(m["config"]["encoders"], nlohmann::json::array({"tfidf"}));
    EXPECT_EQ(m["artifacts"]["results_csv"], "results.csv");
}

TEST(Experiment, WriteOutputs) {
    auto res = run(base_config(), small_corpus());
    testutil::TempDir tmp("out");
    write_outputs(res, tmp.path() / "nested");
    for (auto f : {"results.csv", "tables.txt", "manifest.json"}) EXPECT_TRUE(std::filesystem::exists(tmp.path() / "nested" / f));
    EXPECT_EQ(read_file(tmp.path() / "nested" / "results.csv"), res.results_csv);
}

TEST(Experiment, LoadsCorpusFromConfigPath) {
    auto cfg = base_config();
    cfg.corpus_path = testutil::data_path("mini.csv");
    cfg.test_fraction = 0.25;
    cfg.models = {ModelKind::lr};
    auto res = run_experiment(cfg);
    EXPECT_EQ(res.reports.size(), 1u);
    EXPECT_TRUE(res.manifest["timings_ms"].contains("load"));
    cfg.corpus_path = "/nonexistent.csv";
    EXPECT_THROW(run_experiment(cfg), Error);
}

TEST(Config, MinimalConfigGetsDefaults) {
    const auto dir = testutil::data_path("");
    auto res = parse_config(nlohmann::json::parse(R"({"corpus":{"path":"mini.csv"},"encoders":["tfidf"],"models":["lr"]})"), dir);
    ASSERT_TRUE(res.ok()) << res.errors.front();
    const auto& c = *res.config;
    EXPECT_EQ(c.corpus_path, dir / "mini.csv");
    EXPECT_EQ(c.corpus_format, CorpusFormat::csv);
    EXPECT_DOUBLE_EQ(c.test_fraction, 0.2);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_TRUE(c.preprocess.remove_urls);
    EXPECT_TRUE(c.preprocess.strip_sigils);
    EXPECT_TRUE(c.preprocess.remove_stopwords);
    EXPECT_FALSE(c.preprocess.apply_stemming);
    EXPECT_FALSE(c.augment_target.has_value());
    EXPECT_FALSE(c.augment_after_split);
    EXPECT_EQ(c.min_df, 1u);
    EXPECT_FALSE(c.max_features.has_value());
    EXPECT_EQ(c.word2vec.dim, 100u);
    EXPECT_EQ(c.word2vec.window, 5u);
    EXPECT_EQ(c.hyperparameters.lr.epochs, 500u);
    EXPECT_DOUBLE_EQ(c.hyperparameters.lr.learning_rate, 0.1);
    EXPECT_EQ(c.hyperparameters.svm.epochs, 50u);
    EXPECT_EQ(c.hyperparameters.rf.n_trees, 100u);
    EXPECT_TRUE(c.hyperparameters.rf.bootstrap);
    EXPECT_FALSE(c.hyperparameters.dt.max_depth.has_value());
    EXPECT_EQ(c.threads, 1u);
    EXPECT_EQ(c.output_dir, dir / "results");
}

TEST(Config, UnknownEncoder) {
    auto errs = config_errors(R"({"corpus":{"path":"mini.csv"},"encoders":["glove"],"models":["lr"]})", testutil::data_path(""));
    EXPECT_TRUE(contains(errs, "unknown encoder: glove"));
}

TEST(Config, FractionErrorNamesField) {
    auto errs = config_errors(R"({"corpus":{"path":"mini.csv"},"split":{"test_fraction":1.5},"encoders":["tfidf"],"models":["lr"]})",
                              testutil::data_path(""));
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_NE(errs[0].find("split.test_fraction"), std::string::npos) << errs[0];
}

TEST(Config, AllErrorsAtOnce) {
    auto res = validate_config(testutil::data_path("bad_config.json"));
    ASSERT_FALSE(res.ok());
    auto has = [&](const std::string& needle) {
        return std::any_of(res.errors.begin(), res.errors.end(), [&](const std::string& e) { return e.find(needle) != std::string::npos; });
    };
    EXPECT_TRUE(has("missing file: corpus.path"));
    EXPECT_TRUE(has("split.test_fraction"));
    EXPECT_TRUE(has("unknown encoder: glove"));
    EXPECT_TRUE(has("unknown model: knn"));
    EXPECT_TRUE(has("unknown field: colour"));
    EXPECT_EQ(res.errors.size(), 5u);
}

TEST(Config, MissingExternalFileAndEmptyLists) {
    auto errs = config_errors(R"({"corpus":{"path":"mini.csv"},"encoders":["counts+external:nope.jsonl"],"models":[]})",
                              testutil::data_path(""));
    EXPECT_TRUE(std::any_of(errs.begin(), errs.end(), [](const std::string& e) { return e.find("missing file: encoder external:nope.jsonl") == 0; }));
    EXPECT_TRUE(contains(errs, "models must be a nonempty list"));
}

TEST(Config, CommentsAllowedAndUnreadableFileThrows) {
    testutil::TempDir tmp("cfgc");
    std::filesystem::copy_file(testutil::data_path("mini.csv"), tmp.path() / "mini.csv");
    const auto path = tmp.write("c.json", "// demo\n{ \"corpus\": {\"path\": \"mini.csv\"}, /* inline */ \"encoders\": [\"counts\"], \"models\": [\"dt\"] }\n");
    auto res = validate_config(path);
    ASSERT_TRUE(res.ok()) << res.errors.front();
    EXPECT_EQ(res.config->corpus_path, tmp.path() / "mini.csv");
    EXPECT_THROW(validate_config(tmp.path() / "absent.json"), Error);
}

TEST(Config, JsonEchoReflectsOverrides) {
    const auto dir = testutil::data_path("");
    auto res = parse_config(nlohmann::json::parse(R"({"corpus":{"path":"mini.csv"},"encoders":["tfidf"],"models":["lr","rf"],
        "hyperparameters":{"rf":{"n_trees":7},"dt":{"max_depth":3}},"augment":{"target_per_class":5}})"), dir);
    ASSERT_TRUE(res.ok());
    auto echo = config_to_json(*res.config);
    EXPECT_EQ(echo["hyperparameters"]["rf"]["n_trees"], 7);
    EXPECT_EQ(echo["hyperparameters"]["dt"]["max_depth"], 3);
    EXPECT_EQ(echo["augment"]["target_per_class"], 5);
    EXPECT_EQ(echo["models"], nlohmann::json::array({"lr", "rf"}));
}

TEST(Experiment, ForestNoWorseThanSingleTreeOnDeskCorpus) {
    const auto corpus = generate_synthetic_corpus();
    ExperimentConfig cfg;
    cfg.corpus_path = "desk.csv";
    cfg.encoders = {"tfidf"};
    cfg.models = {ModelKind::rf, ModelKind::dt};
    const auto res = run(cfg, corpus);
    ASSERT_TRUE(res.failures.empty());
    double rf = -1, dt = -1;
    for (const auto& r : res.reports) (r.model == "rf" ? rf : dt) = r.accuracy;
    EXPECT_GE(rf, dt - 0.02) << "rf " << rf << " dt " << dt;
}
