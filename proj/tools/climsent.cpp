// climsent: experiment runner for the sentiment workbench.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "climsent/climsent.hpp"

namespace fs = std::filesystem;
using namespace climsent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool augment_after_split = false;
    std::optional<std::size_t> threads;
};

ExperimentConfig load_config_or_throw(const fs::path& path, const Overrides& o) {
    auto res = validate_config(path);
    if (!res.ok()) {
        std::string msg = "invalid config " + path.string() + ":";
        for (const auto& e : res.errors) msg += "\n  " + e;
        throw Error(msg);
    }
    auto cfg = *res.config;
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.output_dir = *o.out;
    if (o.augment_after_split) cfg.augment_after_split = true;
    if (o.threads) cfg.threads = std::max<std::size_t>(*o.threads, 1);
    return cfg;
}

int cmd_run(const fs::path& config_path, const Overrides& o) {
    const auto cfg = load_config_or_throw(config_path, o);
    const auto result = run_experiment(cfg);
    write_outputs(result, cfg.output_dir);
    std::cout << result.tables_text;
    for (const auto& f : result.failures) {
        std::cerr << "cell " << f.encoder << "/" << f.model << " failed at " << f.stage << ": " << f.message << '\n';
    }
    std::cerr << "wrote " << (cfg.output_dir / "results.csv").string() << ", tables.txt, manifest.json\n";
    return result.exit_code();
}

int cmd_validate(const fs::path& config_path) {
    const auto res = validate_config(config_path);
    if (!res.ok()) {
        for (const auto& e : res.errors) std::cerr << "error: " << e << '\n';
        return kExitConfig;
    }
    std::cout << config_to_json(*res.config).dump(2) << '\n';
    return kExitOk;
}

struct CorpusSource {
    std::string config;
    std::string corpus;
    std::string format = "csv";
};

std::pair<LabeledCorpus, ExperimentConfig> resolve_corpus(const CorpusSource& src, const Overrides& o) {
    ExperimentConfig cfg;
    if (!src.config.empty()) {
        cfg = load_config_or_throw(src.config, o);
    } else if (!src.corpus.empty()) {
        cfg.corpus_path = src.corpus;
        cfg.corpus_format = parse_corpus_format(src.format);
        if (o.seed) cfg.seed = *o.seed;
    } else {
        throw Error("either --config or --corpus is required");
    }
    return {load_corpus(cfg.corpus_path, cfg.corpus_format), cfg};
}

int cmd_inspect(const CorpusSource& src, const Overrides& o) {
    const auto [corpus, cfg] = resolve_corpus(src, o);
    std::cout << "documents: " << corpus.size() << '\n';
    for (const auto& [label, count] : class_distribution(corpus)) {
        std::printf("  %-9s %6zu  (%.2f%%)\n", std::string(to_string(label)).c_str(), count,
                    100.0 * static_cast<double>(count) / static_cast<double>(corpus.size()));
    }
    const Stoplist stop = cfg.stopwords_path ? load_stoplist(*cfg.stopwords_path) : default_stoplist();
    const auto seqs = preprocess_corpus(corpus, cfg.preprocess, stop);
    constexpr std::size_t width = 5;
    std::map<std::size_t, std::size_t> bins;
    std::size_t total = 0;
    for (const auto& s : seqs) {
        ++bins[s.tokens.size() / width];
        total += s.tokens.size();
    }
    std::printf("tokens per document after preprocessing (mean %.2f):\n",
                static_cast<double>(total) / static_cast<double>(seqs.size()));
    std::size_t peak = 0;
    for (auto& [b, c] : bins) peak = std::max(peak, c);
    for (auto& [b, c] : bins) {
        const std::size_t bar = (c * 40 + peak - 1) / peak;
        std::printf("  %3zu-%-3zu %6zu %s\n", b * width, b * width + width - 1, c, std::string(bar, '#').c_str());
    }
    return kExitOk;
}

int cmd_export_splits(const CorpusSource& src, const Overrides& o) {
    const auto [corpus, cfg] = resolve_corpus(src, o);
    const auto splits = prepare_splits(corpus, cfg);
    const fs::path dir = o.out ? fs::path(*o.out) : cfg.output_dir;
    fs::create_directories(dir);
    save_corpus(splits.train, dir / "train.jsonl", CorpusFormat::jsonl);
    save_corpus(splits.test, dir / "test.jsonl", CorpusFormat::jsonl);
    std::cout << "train " << splits.train.size() << ", test " << splits.test.size() << " -> " << dir.string() << '\n';
    return kExitOk;
}

int cmd_synth(std::size_t documents, std::uint64_t seed, const std::string& out, const std::string& format) {
    SyntheticCorpusSpec spec;
    spec.documents = documents;
    spec.seed = seed;
    save_corpus(generate_synthetic_corpus(spec), out, parse_corpus_format(format));
    std::cout << "wrote " << documents << " documents to " << out << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"climsent: climate tweet sentiment experiment runner"};
    app.require_subcommand(1);

    Overrides o;
    std::string config;
    CorpusSource src;
    std::uint64_t seed_value = 0;
    std::string out_value;
    std::size_t threads_value = 1;

    auto add_overrides = [&](CLI::App* sub, bool with_threads) {
        sub->add_option("--seed", seed_value, "Master seed (overrides config)");
        sub->add_option("--out", out_value, "Output directory (overrides config)");
        sub->add_flag("--augment-after-split", o.augment_after_split, "Augment the training split only");
        if (with_threads) sub->add_option("--threads", threads_value, "Grid cells run in parallel")->check(CLI::PositiveNumber);
    };

    auto* run = app.add_subcommand("run", "Run the encoder x model grid");
    run->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    add_overrides(run, true);

    auto* validate = app.add_subcommand("validate", "Check a config and print it with defaults filled in");
    validate->add_option("--config", config, "Config file")->required();

    auto* inspect = app.add_subcommand("inspect-corpus", "Class distribution and token-length histogram");
    auto* export_splits = app.add_subcommand("export-splits", "Write train.jsonl and test.jsonl");
    for (auto* sub : {inspect, export_splits}) {
        sub->add_option("--config", src.config, "Config file");
        sub->add_option("--corpus", src.corpus, "Corpus file (instead of --config)");
        sub->add_option("--format", src.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    }
    add_overrides(export_splits, false);

    auto* synth = app.add_subcommand("synth", "Write the seeded synthetic corpus");
    std::size_t synth_docs = 600;
    std::uint64_t synth_seed = SyntheticCorpusSpec{}.seed;
    std::string synth_out, synth_format = "csv";
    synth->add_option("--documents", synth_docs, "Number of documents")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output file")->required();
    synth->add_option("--format", synth_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

    CLI11_PARSE(app, argc, argv);

    auto collect = [&](CLI::App* sub) {
        if (sub->count("--seed")) o.seed = seed_value;
        if (sub->count("--out")) o.out = out_value;
        if (sub->get_option_no_throw("--threads") && sub->count("--threads")) o.threads = threads_value;
    };

    try {
        if (*run) {
            collect(run);
            return cmd_run(config, o);
        }
        if (*validate) return cmd_validate(config);
        if (*inspect) return cmd_inspect(src, o);
        if (*export_splits) {
            collect(export_splits);
            return cmd_export_splits(src, o);
        }
        if (*synth) return cmd_synth(synth_docs, synth_seed, synth_out, synth_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
