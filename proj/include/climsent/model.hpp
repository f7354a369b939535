#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "climsent/corpus.hpp"
#include "climsent/error.hpp"
#include "climsent/forest.hpp"
#include "climsent/linear.hpp"
#include "climsent/tree.hpp"

namespace climsent {

enum class ModelKind { rf, svm, dt, lr };

/// Row order used by the results tables.
inline constexpr std::array<ModelKind, 4> kAllModelKinds = {ModelKind::rf, ModelKind::svm, ModelKind::dt,
                                                           ModelKind::lr};

inline std::string_view to_string(ModelKind k) noexcept {
    switch (k) {
        case ModelKind::rf: return "rf";
        case ModelKind::svm: return "svm";
        case ModelKind::dt: return "dt";
        case ModelKind::lr: return "lr";
    }
    return "?";
}

inline std::string display_name(ModelKind k) {
    std::string s(to_string(k));
    for (auto& c : s) c = static_cast<char>(c - 'a' + 'A');
    return s;
}

inline std::optional<ModelKind> parse_model_kind(std::string_view name) {
    for (auto k : kAllModelKinds) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

struct ModelHyperparameters {
    LogisticConfig lr;
    SvmConfig svm;
    TreeConfig dt;
    ForestConfig rf;
};

inline nlohmann::json to_json(const LogisticConfig& c) {
    return {{"learning_rate", c.learning_rate}, {"l2_lambda", c.l2_lambda}, {"epochs", c.epochs},
            {"tolerance", c.tolerance}};
}

inline nlohmann::json to_json(const SvmConfig& c) {
    return {{"learning_rate", c.learning_rate}, {"l2_lambda", c.l2_lambda}, {"epochs", c.epochs}, {"seed", c.seed}};
}

inline nlohmann::json to_json(const TreeConfig& c) {
    nlohmann::json j = {{"min_samples_split", c.min_samples_split}};
    j["max_depth"] = c.max_depth ? nlohmann::json(*c.max_depth) : nlohmann::json(nullptr);
    return j;
}

inline nlohmann::json to_json(const ForestConfig& c) {
    nlohmann::json j = {{"n_trees", c.n_trees}, {"bootstrap", c.bootstrap}, {"seed", c.seed}};
    j["features_per_split"] = c.features_per_split ? nlohmann::json(*c.features_per_split) : nlohmann::json(nullptr);
    j["max_depth"] = c.tree.max_depth ? nlohmann::json(*c.tree.max_depth) : nlohmann::json(nullptr);
    j["min_samples_split"] = c.tree.min_samples_split;
    return j;
}

/// A fitted classifier plus the configuration that produced it.
struct TrainedModel {
    std::variant<LinearModel, TreeModel, ForestModel> model;
    nlohmann::json config;

    const ClassList& classes() const {
        return std::visit([](const auto& m) -> const ClassList& { return m.classes(); }, model);
    }
    std::size_t n_features() const {
        return std::visit([](const auto& m) { return m.n_features(); }, model);
    }
};

/// Trains `kind`; `seed` replaces the seed in the svm / rf hyperparameters.
inline TrainedModel train_model(ModelKind kind, const FeatureMatrix& x, std::span<const std::size_t> y,
                                const ClassList& classes, const ModelHyperparameters& hp, std::uint64_t seed) {
    switch (kind) {
        case ModelKind::lr:
            return {train_logistic(x, y, classes, hp.lr), to_json(hp.lr)};
        case ModelKind::svm: {
            auto c = hp.svm;
            c.seed = seed;
            return {train_svm(x, y, classes, c), to_json(c)};
        }
        case ModelKind::dt:
            return {train_tree(x, y, classes, hp.dt), to_json(hp.dt)};
        case ModelKind::rf: {
            auto c = hp.rf;
            c.seed = seed;
            return {train_forest(x, y, classes, c), to_json(c)};
        }
    }
    throw Error("train_model: unknown model kind");
}

inline std::vector<std::size_t> predict(const TrainedModel& model, const FeatureMatrix& x) {
    if (x.cols() != model.n_features()) {
        throw Error("predict: feature width mismatch (expected " + std::to_string(model.n_features()) + ", got " +
                    std::to_string(x.cols()) + ")");
    }
    std::vector<std::size_t> out(x.rows());
    std::visit(
        [&](const auto& m) {
            for (std::size_t r = 0; r < x.rows(); ++r) out[r] = m.predict_row(x, r);
        },
        model.model);
    return out;
}

namespace detail {

inline nlohmann::json nodes_to_json(const TreeModel& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes()) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"counts", n.class_counts},
                         {"prediction", n.prediction}});
    }
    return nodes;
}

inline TreeModel tree_from_json(const nlohmann::json& nodes, const ClassList& classes, std::size_t n_features) {
    std::vector<TreeNode> out;
    for (const auto& j : nodes) {
        TreeNode n;
        n.feature = j.at("feature").get<std::int64_t>();
        n.threshold = j.at("threshold").get<double>();
        n.left = j.at("left").get<std::int64_t>();
        n.right = j.at("right").get<std::int64_t>();
        n.class_counts = j.at("counts").get<std::vector<std::size_t>>();
        n.prediction = j.at("prediction").get<std::size_t>();
        if (n.prediction >= classes.size() || n.class_counts.size() != classes.size()) {
            throw Error("model json: leaf does not match the class list");
        }
        out.push_back(std::move(n));
    }
    return TreeModel(classes, n_features, std::move(out));
}

}  // namespace detail

/// Self-describing document: kind, classes, feature width, config echo and
/// parameters. Doubles are written in shortest round-trip form, so a
/// reloaded model predicts bit-identically.
inline nlohmann::json model_to_json(const TrainedModel& tm) {
    nlohmann::json j;
    j["format"] = "climsent-model";
    j["version"] = 1;
    j["classes"] = tm.classes();
    j["n_features"] = tm.n_features();
    j["config"] = tm.config;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                j["kind"] = m.kind() == LinearKind::logistic ? "logistic" : "svm";
                j["parameters"] = {{"weights", m.weights()}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                j["kind"] = "tree";
                j["parameters"] = {{"nodes", detail::nodes_to_json(m)}};
            } else {
                j["kind"] = "forest";
                nlohmann::json trees = nlohmann::json::array();
                for (const auto& t : m.trees()) trees.push_back({{"nodes", detail::nodes_to_json(t)}});
                j["parameters"] = {{"features_per_split", m.features_per_split()},
                                   {"tree_seeds", m.tree_seeds()},
                                   {"trees", trees}};
            }
        },
        tm.model);
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "climsent-model") throw Error("model json: unknown format");
        const auto classes = j.at("classes").get<ClassList>();
        const auto d = j.at("n_features").get<std::size_t>();
        const auto kind = j.at("kind").get<std::string>();
        const auto& p = j.at("parameters");
        TrainedModel tm;
        tm.config = j.value("config", nlohmann::json::object());
        if (kind == "logistic" || kind == "svm") {
            tm.model = LinearModel(kind == "logistic" ? LinearKind::logistic : LinearKind::svm, classes, d,
                                   p.at("weights").get<std::vector<double>>());
        } else if (kind == "tree") {
            tm.model = detail::tree_from_json(p.at("nodes"), classes, d);
        } else if (kind == "forest") {
            std::vector<TreeModel> trees;
            for (const auto& t : p.at("trees")) trees.push_back(detail::tree_from_json(t.at("nodes"), classes, d));
            tm.model = ForestModel(classes, d, std::move(trees), p.at("tree_seeds").get<std::vector<std::uint64_t>>(),
                                   p.at("features_per_split").get<std::size_t>());
        } else {
            throw Error("model json: unknown kind \"" + kind + "\"");
        }
        return tm;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model json: ") + e.what());
    }
}

inline void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out << model_to_json(model).dump() << '\n';
}

inline TrainedModel load_model(const std::filesystem::path& path) {
    try {
        return model_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("model json: " + std::string(e.what()));
    }
}

}  // namespace climsent
