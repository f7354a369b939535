#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "climsent/corpus.hpp"
#include "climsent/eval.hpp"
#include "climsent/external.hpp"
#include "climsent/features.hpp"
#include "climsent/model.hpp"
#include "climsent/preprocess.hpp"
#include "climsent/word2vec.hpp"

namespace climsent {

/// A fully validated experiment description. Relative paths have already
/// been resolved against the config file's directory.
struct ExperimentConfig {
    std::filesystem::path corpus_path;
    CorpusFormat corpus_format = CorpusFormat::csv;
    PreprocessConfig preprocess;
    std::optional<std::filesystem::path> stopwords_path;  // built-in list when empty
    std::optional<std::size_t> augment_target;
    bool augment_after_split = false;
    double test_fraction = 0.2;
    std::uint64_t seed = 42;
    std::vector<std::string> encoders;  // e.g. "tfidf", "tfidf+counts", "external:bert.jsonl"
    std::vector<ModelKind> models;
    std::size_t min_df = 1;
    std::optional<std::size_t> max_features;
    Word2VecParams word2vec;
    ModelHyperparameters hyperparameters;
    std::map<std::string, std::filesystem::path> external_paths;  // "external:<x>" part -> resolved file
    std::filesystem::path output_dir = "results";
    std::size_t threads = 1;
};

/// Either a config or every problem found in the document.
struct ConfigResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;

    bool ok() const noexcept { return config.has_value(); }
};

inline std::vector<std::string> split_encoder_spec(std::string_view spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t end = spec.find('+', start);
        if (end == std::string_view::npos) end = spec.size();
        parts.emplace_back(detail::trim(spec.substr(start, end - start)));
        start = end + 1;
    }
    return parts;
}

namespace detail {

/// Reads typed fields out of a JSON object, recording one message per
/// problem instead of stopping at the first.
class FieldReader {
public:
    FieldReader(const nlohmann::json& obj, std::string prefix, std::vector<std::string>& errors)
        : obj_(obj), prefix_(std::move(prefix)), errors_(errors) {}

    std::string path(std::string_view key) const { return prefix_.empty() ? std::string(key) : prefix_ + "." + std::string(key); }

    bool has(std::string_view key) const { return obj_.is_object() && obj_.contains(std::string(key)) && !obj_[std::string(key)].is_null(); }

    const nlohmann::json& raw(std::string_view key) const { return obj_[std::string(key)]; }

    void expect_keys(std::initializer_list<std::string_view> allowed) {
        if (!obj_.is_object()) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            bool known = false;
            for (auto a : allowed) known = known || it.key() == a;
            if (!known) errors_.push_back("unknown field: " + path(it.key()));
        }
    }

    void read(std::string_view key, bool& out) {
        if (!has(key)) return;
        if (!raw(key).is_boolean()) return error(key, "must be true or false");
        out = raw(key).get<bool>();
    }

    void read(std::string_view key, std::string& out) {
        if (!has(key)) return;
        if (!raw(key).is_string()) return error(key, "must be a string");
        out = raw(key).get<std::string>();
    }

    void read(std::string_view key, double& out, bool positive = false) {
        if (!has(key)) return;
        if (!raw(key).is_number()) return error(key, "must be a number");
        const double v = raw(key).get<double>();
        if (positive && !(v > 0.0)) return error(key, "must be positive, got " + raw(key).dump());
        if (!positive && !(v >= 0.0)) return error(key, "must be non-negative, got " + raw(key).dump());
        out = v;
    }

    void read(std::string_view key, std::size_t& out, std::size_t min_value = 0) {
        if (!has(key)) return;
        if (!raw(key).is_number_unsigned()) return error(key, "must be a non-negative integer");
        const auto v = raw(key).get<std::size_t>();
        if (v < min_value) return error(key, "must be >= " + std::to_string(min_value) + ", got " + std::to_string(v));
        out = v;
    }

    void read(std::string_view key, std::optional<std::size_t>& out, std::size_t min_value = 0) {
        if (!has(key)) return;
        std::size_t v = 0;
        const auto before = errors_.size();
        read(key, v, min_value);
        if (errors_.size() == before) out = v;
    }

    void read_u64(std::string_view key, std::uint64_t& out) {
        if (!has(key)) return;
        if (!raw(key).is_number_unsigned()) return error(key, "must be a non-negative integer");
        out = raw(key).get<std::uint64_t>();
    }

    void error(std::string_view key, const std::string& message) { errors_.push_back(path(key) + " " + message); }

    FieldReader child(std::string_view key) {
        static const nlohmann::json empty = nlohmann::json::object();
        if (!has(key)) return {empty, path(key), errors_};
        if (!raw(key).is_object()) {
            error(key, "must be an object");
            return {empty, path(key), errors_};
        }
        return {raw(key), path(key), errors_};
    }

private:
    const nlohmann::json& obj_;
    std::string prefix_;
    std::vector<std::string>& errors_;
};

inline std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace detail

/// Validates a parsed config document. `base_dir` anchors relative paths.
inline ConfigResult parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {}) {
    ConfigResult result;
    auto& errors = result.errors;
    if (!doc.is_object()) {
        errors.push_back("config must be a JSON object");
        return result;
    }
    ExperimentConfig cfg;
    detail::FieldReader root(doc, "", errors);
    root.expect_keys({"corpus", "preprocess", "augment", "split", "seed", "encoders", "models", "features",
                      "hyperparameters", "output_dir", "threads"});

    {
        auto corpus = root.child("corpus");
        corpus.expect_keys({"path", "format"});
        std::string path, format = "csv";
        corpus.read("path", path);
        corpus.read("format", format);
        if (!root.has("corpus") || path.empty()) {
            errors.push_back("corpus.path is required");
        } else {
            cfg.corpus_path = detail::resolve_path(base_dir, path);
            if (!std::filesystem::exists(cfg.corpus_path)) errors.push_back("missing file: corpus.path " + cfg.corpus_path.string());
        }
        try {
            cfg.corpus_format = parse_corpus_format(format);
        } catch (const Error& e) {
            errors.push_back(std::string("corpus.format: ") + e.what());
        }
    }
    {
        auto pre = root.child("preprocess");
        pre.expect_keys({"remove_urls", "strip_sigils", "remove_stopwords", "stemming", "stopwords"});
        pre.read("remove_urls", cfg.preprocess.remove_urls);
        pre.read("strip_sigils", cfg.preprocess.strip_sigils);
        pre.read("remove_stopwords", cfg.preprocess.remove_stopwords);
        pre.read("stemming", cfg.preprocess.apply_stemming);
        std::string stop;
        pre.read("stopwords", stop);
        if (!stop.empty()) {
            cfg.stopwords_path = detail::resolve_path(base_dir, stop);
            if (!std::filesystem::exists(*cfg.stopwords_path)) {
                errors.push_back("missing file: preprocess.stopwords " + cfg.stopwords_path->string());
            }
        }
    }
    {
        auto aug = root.child("augment");
        aug.expect_keys({"target_per_class", "after_split"});
        aug.read("target_per_class", cfg.augment_target, 1);
        aug.read("after_split", cfg.augment_after_split);
    }
    {
        auto split = root.child("split");
        split.expect_keys({"test_fraction"});
        if (split.has("test_fraction")) {
            if (!split.raw("test_fraction").is_number()) {
                split.error("test_fraction", "must be a number");
            } else {
                const double f = split.raw("test_fraction").get<double>();
                if (!(f > 0.0 && f < 1.0)) {
                    split.error("test_fraction", "must lie in (0,1), got " + split.raw("test_fraction").dump());
                } else {
                    cfg.test_fraction = f;
                }
            }
        }
    }
    root.read_u64("seed", cfg.seed);
    root.read("threads", cfg.threads, 1);
    {
        std::string out;
        root.read("output_dir", out);
        if (!out.empty()) cfg.output_dir = detail::resolve_path(base_dir, out);
        else cfg.output_dir = detail::resolve_path(base_dir, "results");
    }

    if (!root.has("encoders") || !doc["encoders"].is_array() || doc["encoders"].empty()) {
        errors.push_back("encoders must be a nonempty list");
    } else {
        for (const auto& e : doc["encoders"]) {
            if (!e.is_string()) {
                errors.push_back("encoders entries must be strings");
                continue;
            }
            const auto spec = e.get<std::string>();
            bool valid = true;
            for (const auto& part : split_encoder_spec(spec)) {
                if (part == "counts" || part == "tfidf" || part == "word2vec") continue;
                if (part.rfind("external:", 0) == 0 && part.size() > 9) {
                    const auto p = detail::resolve_path(base_dir, part.substr(9));
                    if (!std::filesystem::exists(p)) {
                        errors.push_back("missing file: encoder " + part + " (" + p.string() + ")");
                        valid = false;
                    } else {
                        cfg.external_paths[part] = p;
                    }
                    continue;
                }
                errors.push_back("unknown encoder: " + part);
                valid = false;
            }
            if (valid) cfg.encoders.push_back(spec);
        }
    }

    if (!root.has("models") || !doc["models"].is_array() || doc["models"].empty()) {
        errors.push_back("models must be a nonempty list");
    } else {
        for (const auto& m : doc["models"]) {
            auto kind = m.is_string() ? parse_model_kind(m.get<std::string>()) : std::nullopt;
            if (!kind) {
                errors.push_back("unknown model: " + (m.is_string() ? m.get<std::string>() : m.dump()));
            } else {
                cfg.models.push_back(*kind);
            }
        }
    }

    {
        auto feat = root.child("features");
        feat.expect_keys({"min_df", "max_features", "word2vec"});
        feat.read("min_df", cfg.min_df, 1);
        feat.read("max_features", cfg.max_features, 1);
        auto w2v = feat.child("word2vec");
        w2v.expect_keys({"dim", "window", "negatives", "epochs", "learning_rate", "min_count"});
        w2v.read("dim", cfg.word2vec.dim, 1);
        w2v.read("window", cfg.word2vec.window, 1);
        w2v.read("negatives", cfg.word2vec.negatives, 0);
        w2v.read("epochs", cfg.word2vec.epochs, 1);
        w2v.read("learning_rate", cfg.word2vec.learning_rate, true);
        w2v.read("min_count", cfg.word2vec.min_count, 1);
    }
    {
        auto hp = root.child("hyperparameters");
        hp.expect_keys({"lr", "svm", "dt", "rf"});
        auto& h = cfg.hyperparameters;
        auto lr = hp.child("lr");
        lr.expect_keys({"learning_rate", "l2_lambda", "epochs", "tolerance"});
        lr.read("learning_rate", h.lr.learning_rate, true);
        lr.read("l2_lambda", h.lr.l2_lambda);
        lr.read("epochs", h.lr.epochs, 1);
        lr.read("tolerance", h.lr.tolerance);
        auto svm = hp.child("svm");
        svm.expect_keys({"learning_rate", "l2_lambda", "epochs"});
        svm.read("learning_rate", h.svm.learning_rate, true);
        svm.read("l2_lambda", h.svm.l2_lambda);
        svm.read("epochs", h.svm.epochs, 1);
        if (h.svm.learning_rate * h.svm.l2_lambda >= 1.0) {
            errors.push_back("hyperparameters.svm learning_rate * l2_lambda must be below 1");
        }
        auto dt = hp.child("dt");
        dt.expect_keys({"max_depth", "min_samples_split"});
        dt.read("max_depth", h.dt.max_depth, 0);
        dt.read("min_samples_split", h.dt.min_samples_split, 1);
        auto rf = hp.child("rf");
        rf.expect_keys({"n_trees", "features_per_split", "bootstrap", "max_depth", "min_samples_split", "threads"});
        rf.read("n_trees", h.rf.n_trees, 1);
        rf.read("features_per_split", h.rf.features_per_split, 1);
        rf.read("bootstrap", h.rf.bootstrap);
        rf.read("max_depth", h.rf.tree.max_depth, 0);
        rf.read("min_samples_split", h.rf.tree.min_samples_split, 1);
        rf.read("threads", h.rf.threads, 1);
    }

    if (errors.empty()) result.config = std::move(cfg);
    return result;
}

/// Reads and validates a config file. JSON with `//` and `/* */` comments is
/// accepted. Throws only when the file cannot be read.
inline ConfigResult validate_config(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw Error("missing file: " + path.string());
    const std::string text = read_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        ConfigResult r;
        r.errors.push_back(std::string("config is not valid JSON: ") + e.what());
        return r;
    }
    return parse_config(doc, path.parent_path());
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["corpus"] = {{"path", c.corpus_path.string()}, {"format", to_string(c.corpus_format)}};
    j["preprocess"] = {{"remove_urls", c.preprocess.remove_urls},
                       {"strip_sigils", c.preprocess.strip_sigils},
                       {"remove_stopwords", c.preprocess.remove_stopwords},
                       {"stemming", c.preprocess.apply_stemming},
                       {"stopwords", c.stopwords_path ? nlohmann::json(c.stopwords_path->string()) : nlohmann::json(nullptr)}};
    j["augment"] = {{"target_per_class", c.augment_target ? nlohmann::json(*c.augment_target) : nlohmann::json(nullptr)},
                    {"after_split", c.augment_after_split}};
    j["split"] = {{"test_fraction", c.test_fraction}};
    j["seed"] = c.seed;
    j["encoders"] = c.encoders;
    std::vector<std::string> models;
    for (auto m : c.models) models.emplace_back(to_string(m));
    j["models"] = models;
    j["features"] = {{"min_df", c.min_df},
                     {"max_features", c.max_features ? nlohmann::json(*c.max_features) : nlohmann::json(nullptr)},
                     {"word2vec",
                      {{"dim", c.word2vec.dim},
                       {"window", c.word2vec.window},
                       {"negatives", c.word2vec.negatives},
                       {"epochs", c.word2vec.epochs},
                       {"learning_rate", c.word2vec.learning_rate},
                       {"min_count", c.word2vec.min_count}}}};
    j["hyperparameters"] = {{"lr", to_json(c.hyperparameters.lr)},
                            {"svm", to_json(c.hyperparameters.svm)},
                            {"dt", to_json(c.hyperparameters.dt)},
                            {"rf", to_json(c.hyperparameters.rf)}};
    // per-cell seeds replace the forest seed at run time
    j["hyperparameters"]["rf"].erase("seed");
    j["hyperparameters"]["rf"]["threads"] = c.hyperparameters.rf.threads;
    j["output_dir"] = c.output_dir.string();
    j["threads"] = c.threads;
    return j;
}

/// Seed of one grid cell, a function of the master seed and the cell name only.
inline std::uint64_t cell_seed(std::uint64_t seed, std::string_view encoder, ModelKind model) {
    return derive_seed(seed, "cell/" + std::string(encoder) + "/" + std::string(to_string(model)));
}

struct PreparedSplits {
    LabeledCorpus train;
    LabeledCorpus test;
};

/// Augmentation then split (default), or split then augmentation of the
/// training half only.
inline PreparedSplits prepare_splits(const LabeledCorpus& corpus, const ExperimentConfig& cfg) {
    const auto augment_seed = derive_seed(cfg.seed, "augment");
    if (cfg.augment_target && !cfg.augment_after_split) {
        auto grown = augment(corpus, *cfg.augment_target, augment_seed);
        auto split = stratified_split(grown, cfg.test_fraction, cfg.seed);
        return {std::move(split.train), std::move(split.test)};
    }
    auto split = stratified_split(corpus, cfg.test_fraction, cfg.seed);
    if (cfg.augment_target) split.train = augment(split.train, *cfg.augment_target, augment_seed);
    return {std::move(split.train), std::move(split.test)};
}

struct CellFailure {
    std::string encoder;
    std::string model;
    std::string stage;
    std::string message;
};

struct ExperimentResult {
    std::vector<EvalReport> reports;  // grid order, failed cells omitted
    std::vector<CellFailure> failures;
    std::string results_csv;
    std::string tables_text;
    nlohmann::json manifest;
    std::map<std::string, std::vector<std::string>> fitted_vocabularies;  // per fitted text encoder

    int exit_code() const noexcept { return failures.empty() ? 0 : 2; }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct EncodedBlock {
    std::optional<FeatureMatrix> train;
    std::optional<FeatureMatrix> test;
    std::string error;
};

template <class F>
void parallel_for(std::size_t n, std::size_t threads, F&& body) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
}

}  // namespace detail

/// Runs the encoder x model grid on an already loaded corpus. Encoders are
/// fit on the training split only. A failing cell is recorded and the rest
/// of the grid still runs.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const LabeledCorpus& corpus,
                                       std::string_view corpus_bytes) {
    using detail::Clock;
    ExperimentResult result;
    nlohmann::json timings = nlohmann::json::object();
    auto t0 = Clock::now();

    const auto splits = prepare_splits(corpus, cfg);
    timings["augment_and_split"] = detail::elapsed_ms(t0);

    t0 = Clock::now();
    const Stoplist stoplist = cfg.stopwords_path ? load_stoplist(*cfg.stopwords_path) : default_stoplist();
    const auto train_tokens = preprocess_corpus(splits.train, cfg.preprocess, stoplist);
    const auto test_tokens = preprocess_corpus(splits.test, cfg.preprocess, stoplist);
    timings["preprocess"] = detail::elapsed_ms(t0);

    std::vector<std::size_t> y_train, y_test;
    for (const auto& d : splits.train) y_train.push_back(label_index(d.label));
    for (const auto& d : splits.test) y_test.push_back(label_index(d.label));
    const ClassList classes = label_names();

    // Fit each distinct base encoder once and reuse it across combinations.
    std::set<std::string> parts;
    for (const auto& spec : cfg.encoders) {
        for (auto& p : split_encoder_spec(spec)) parts.insert(p);
    }
    const auto w2v_seed = derive_seed(cfg.seed, "word2vec");
    std::map<std::string, detail::EncodedBlock> blocks;
    nlohmann::json feature_timings = nlohmann::json::object();
    nlohmann::json vocab_sizes = nlohmann::json::object();
    for (const auto& part : parts) {
        auto tp = Clock::now();
        auto& block = blocks[part];
        try {
            if (part == "counts") {
                auto enc = CountEncoder::fit(train_tokens, cfg.min_df, cfg.max_features);
                block.train = enc.transform(train_tokens);
                block.test = enc.transform(test_tokens);
                result.fitted_vocabularies[part] = enc.vocab.terms();
            } else if (part == "tfidf") {
                auto enc = TfidfEncoder::fit(train_tokens, cfg.min_df, cfg.max_features);
                block.train = enc.transform(train_tokens);
                block.test = enc.transform(test_tokens);
                result.fitted_vocabularies[part] = enc.vocab.terms();
            } else if (part == "word2vec") {
                auto params = cfg.word2vec;
                params.seed = w2v_seed;
                auto enc = Word2VecEncoder::fit(train_tokens, params);
                block.train = enc.transform(train_tokens);
                block.test = enc.transform(test_tokens);
                result.fitted_vocabularies[part] = enc.table.terms();
            } else if (auto it = cfg.external_paths.find(part); it != cfg.external_paths.end()) {
                const auto set = load_external_embeddings(it->second);
                block.train = align_external(set, splits.train, part);
                block.test = align_external(set, splits.test, part);
            } else {
                throw Error("unknown encoder: " + part);
            }
            if (result.fitted_vocabularies.count(part)) vocab_sizes[part] = result.fitted_vocabularies[part].size();
        } catch (const std::exception& e) {
            block.error = e.what();
        }
        feature_timings[part] = detail::elapsed_ms(tp);
    }

    struct Cell {
        std::string encoder;
        ModelKind model;
        std::optional<EvalReport> report;
        std::optional<CellFailure> failure;
        double ms = 0.0;
    };
    std::vector<Cell> cells;
    std::map<std::string, std::pair<std::optional<FeatureMatrix>, std::optional<FeatureMatrix>>> encoded;
    std::map<std::string, std::string> encode_errors;
    for (const auto& spec : cfg.encoders) {
        if (!encoded.count(spec) && !encode_errors.count(spec)) {
            try {
                std::vector<FeatureMatrix> tr, te;
                for (const auto& p : split_encoder_spec(spec)) {
                    const auto& b = blocks.at(p);
                    if (!b.error.empty()) throw Error(p + ": " + b.error);
                    tr.push_back(*b.train);
                    te.push_back(*b.test);
                }
                encoded[spec] = {concat_features(tr), concat_features(te)};
            } catch (const std::exception& e) {
                encode_errors[spec] = e.what();
            }
        }
        for (auto m : cfg.models) cells.push_back({spec, m, std::nullopt, std::nullopt, 0.0});
    }

    detail::parallel_for(cells.size(), cfg.threads, [&](std::size_t i) {
        auto& cell = cells[i];
        const auto tc = Clock::now();
        const std::string model_name(to_string(cell.model));
        if (auto it = encode_errors.find(cell.encoder); it != encode_errors.end()) {
            cell.failure = CellFailure{cell.encoder, model_name, "features", it->second};
            return;
        }
        const auto& [x_train, x_test] = encoded.at(cell.encoder);
        std::string stage = "train";
        try {
            const auto model = train_model(cell.model, *x_train, y_train, classes, cfg.hyperparameters,
                                           cell_seed(cfg.seed, cell.encoder, cell.model));
            stage = "predict";
            const auto pred = predict(model, *x_test);
            stage = "evaluate";
            cell.report = metrics(confusion_matrix(y_test, pred, classes), cell.encoder, model_name);
        } catch (const std::exception& e) {
            cell.failure = CellFailure{cell.encoder, model_name, stage, e.what()};
        }
        cell.ms = detail::elapsed_ms(tc);
    });

    nlohmann::json cell_timings = nlohmann::json::object();
    nlohmann::json cell_seeds = nlohmann::json::object();
    nlohmann::json failures = nlohmann::json::array();
    for (auto& cell : cells) {
        const std::string key = cell.encoder + "/" + std::string(to_string(cell.model));
        cell_timings[key] = cell.ms;
        cell_seeds[key] = cell_seed(cfg.seed, cell.encoder, cell.model);
        if (cell.report) result.reports.push_back(std::move(*cell.report));
        if (cell.failure) {
            failures.push_back({{"encoder", cell.failure->encoder},
                                {"model", cell.failure->model},
                                {"stage", cell.failure->stage},
                                {"message", cell.failure->message}});
            result.failures.push_back(std::move(*cell.failure));
        }
    }

    const auto formatted = format_results(result.reports);
    result.results_csv = formatted.csv;
    result.tables_text = formatted.text;

    timings["features"] = feature_timings;
    timings["cells"] = cell_timings;
    nlohmann::json dist = nlohmann::json::object();
    for (auto& [label, count] : class_distribution(corpus)) dist[std::string(to_string(label))] = count;

    auto& mf = result.manifest;
    mf["config"] = config_to_json(cfg);
    mf["seeds"] = {{"master", cfg.seed},
                   {"split", cfg.seed},
                   {"augment", derive_seed(cfg.seed, "augment")},
                   {"word2vec", w2v_seed},
                   {"cells", cell_seeds}};
    mf["corpus"] = {{"path", cfg.corpus_path.string()},
                    {"format", to_string(cfg.corpus_format)},
                    {"checksum", "fnv1a64:" + detail::hex64(fnv1a64(corpus_bytes))},
                    {"bytes", corpus_bytes.size()},
                    {"documents", corpus.size()},
                    {"class_distribution", dist},
                    {"train_documents", splits.train.size()},
                    {"test_documents", splits.test.size()}};
    mf["vocabulary_sizes"] = vocab_sizes;
    mf["timings_ms"] = timings;
    mf["artifacts"] = {{"results_csv", "results.csv"}, {"tables", "tables.txt"}, {"manifest", "manifest.json"}};
    mf["failures"] = failures;
    return result;
}

/// Loads the corpus named in the config, then runs the grid. Load, augment
/// and split errors propagate as exceptions.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = detail::Clock::now();
    if (!std::filesystem::exists(cfg.corpus_path)) throw Error("missing file: " + cfg.corpus_path.string());
    const std::string bytes = read_file(cfg.corpus_path);
    const auto corpus = parse_corpus(bytes, cfg.corpus_format, cfg.corpus_path.string());
    const double load_ms = detail::elapsed_ms(t0);
    auto result = run_experiment(cfg, corpus, bytes);
    result.manifest["timings_ms"]["load"] = load_ms;
    return result;
}

/// Writes results.csv, tables.txt and manifest.json into `dir`.
inline void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write file: " + (dir / name).string());
        out << content;
    };
    write("results.csv", result.results_csv);
    write("tables.txt", result.tables_text);
    write("manifest.json", result.manifest.dump(2) + "\n");
}

}  // namespace climsent
