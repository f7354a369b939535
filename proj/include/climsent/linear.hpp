#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "climsent/error.hpp"
#include "climsent/features.hpp"
#include "climsent/random.hpp"

namespace climsent {

using ClassList = std::vector<std::string>;

struct LogisticConfig {
    double learning_rate = 0.1;
    double l2_lambda = 1e-4;
    std::size_t epochs = 500;
    double tolerance = 1e-7;
};

struct SvmConfig {
    double learning_rate = 0.1;  // eta_0 in eta_t = eta_0 / (1 + eta_0 * lambda * t)
    double l2_lambda = 1e-4;
    std::size_t epochs = 50;
    std::uint64_t seed = 42;
};

enum class LinearKind { logistic, svm };

/// Index of the first maximum; ties resolve to the earliest class.
inline std::size_t argmax_first(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) best = k;
    }
    return best;
}

inline std::vector<double> softmax(std::span<const double> scores) {
    const double mx = *std::max_element(scores.begin(), scores.end());
    std::vector<double> p(scores.size());
    double z = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        p[k] = std::exp(scores[k] - mx);
        z += p[k];
    }
    for (auto& x : p) x /= z;
    return p;
}

/// K x (D + 1) weights, row-major, bias in the last column.
class LinearModel {
public:
    LinearModel() = default;

    LinearModel(LinearKind kind, ClassList classes, std::size_t n_features, std::vector<double> weights)
        : kind_(kind), classes_(std::move(classes)), n_features_(n_features), weights_(std::move(weights)) {
        if (weights_.size() != classes_.size() * (n_features_ + 1)) {
            throw Error("linear model: weight matrix has wrong shape");
        }
        for (double w : weights_) {
            if (!std::isfinite(w)) throw Error("linear model: non-finite weight");
        }
    }

    LinearKind kind() const noexcept { return kind_; }
    const ClassList& classes() const noexcept { return classes_; }
    std::size_t n_features() const noexcept { return n_features_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    std::vector<double> scores(const FeatureMatrix& x, std::size_t row) const {
        const std::size_t stride = n_features_ + 1;
        std::vector<double> s(classes_.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            std::span<const double> w(weights_.data() + k * stride, stride);
            s[k] = x.dot(row, w) + w[n_features_];
        }
        return s;
    }

    std::vector<double> predict_proba(const FeatureMatrix& x, std::size_t row) const {
        return softmax(scores(x, row));
    }

    std::size_t predict_row(const FeatureMatrix& x, std::size_t row) const { return argmax_first(scores(x, row)); }

private:
    LinearKind kind_ = LinearKind::logistic;
    ClassList classes_;
    std::size_t n_features_ = 0;
    std::vector<double> weights_;
};

namespace detail {

inline void check_training_inputs(const FeatureMatrix& x, std::span<const std::size_t> y, std::size_t n_classes,
                                  bool need_two_classes) {
    if (y.size() != x.rows()) {
        throw Error("training: " + std::to_string(y.size()) + " labels for " + std::to_string(x.rows()) + " rows");
    }
    if (x.rows() == 0) throw Error("training: empty input");
    std::vector<char> present(n_classes, 0);
    for (auto label : y) {
        if (label >= n_classes) throw Error("training: label index " + std::to_string(label) + " out of range");
        present[label] = 1;
    }
    if (need_two_classes && std::count(present.begin(), present.end(), 1) < 2) {
        throw Error("training: single-class input");
    }
}

}  // namespace detail

struct LogisticEvaluation {
    double loss = 0.0;
    std::vector<double> gradient;  // same layout as the weights
};

/// Mean softmax cross-entropy plus (lambda/2)||W||^2 over the non-bias
/// weights, and its exact gradient.
inline LogisticEvaluation logistic_objective(const FeatureMatrix& x, std::span<const std::size_t> y,
                                             std::size_t n_classes, std::span<const double> weights,
                                             double l2_lambda) {
    const std::size_t d = x.cols();
    const std::size_t stride = d + 1;
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    LogisticEvaluation ev;
    ev.gradient.assign(weights.size(), 0.0);
    std::vector<double> s(n_classes);

    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t k = 0; k < n_classes; ++k) {
            std::span<const double> w(weights.data() + k * stride, stride);
            s[k] = x.dot(r, w) + w[d];
        }
        const double mx = *std::max_element(s.begin(), s.end());
        double z = 0.0;
        for (double v : s) z += std::exp(v - mx);
        const double log_z = mx + std::log(z);
        ev.loss += (log_z - s[y[r]]) * inv_n;
        for (std::size_t k = 0; k < n_classes; ++k) {
            const double coeff = (std::exp(s[k] - log_z) - (k == y[r] ? 1.0 : 0.0)) * inv_n;
            double* g = ev.gradient.data() + k * stride;
            x.for_each_entry(r, [&](std::size_t c, double v) { g[c] += coeff * v; });
            g[d] += coeff;
        }
    }
    for (std::size_t k = 0; k < n_classes; ++k) {
        for (std::size_t c = 0; c < d; ++c) {
            const double w = weights[k * stride + c];
            ev.loss += 0.5 * l2_lambda * w * w;
            ev.gradient[k * stride + c] += l2_lambda * w;
        }
    }
    return ev;
}

/// Multinomial logistic regression by full-batch gradient descent from zero
/// weights. Stops after `epochs` steps or when a step improves the loss by
/// less than `tolerance`. `loss_trace`, if given, receives the loss before
/// the first step and after every step.
inline LinearModel train_logistic(const FeatureMatrix& x, std::span<const std::size_t> y, const ClassList& classes,
                                  const LogisticConfig& config = {}, std::vector<double>* loss_trace = nullptr) {
    if (!(config.learning_rate > 0.0) || config.epochs == 0 || config.l2_lambda < 0.0 || config.tolerance < 0.0) {
        throw Error("train_logistic: invalid configuration");
    }
    detail::check_training_inputs(x, y, classes.size(), true);
    const std::size_t k = classes.size();
    std::vector<double> w(k * (x.cols() + 1), 0.0);

    auto ev = logistic_objective(x, y, k, w, config.l2_lambda);
    if (loss_trace) loss_trace->push_back(ev.loss);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * ev.gradient[i];
        auto next = logistic_objective(x, y, k, w, config.l2_lambda);
        if (loss_trace) loss_trace->push_back(next.loss);
        const double improvement = ev.loss - next.loss;
        ev = std::move(next);
        if (improvement < config.tolerance) break;
    }
    return LinearModel(LinearKind::logistic, classes, x.cols(), std::move(w));
}

struct HingeEvaluation {
    double loss = 0.0;
    std::vector<double> gradient;  // D weights then the bias
};

/// (lambda/2)||w||^2 + mean max(0, 1 - s (w.x + b)) for one binary scorer
/// with targets s in {+1, -1}, and a subgradient (exact away from margin 1).
inline HingeEvaluation hinge_objective(const FeatureMatrix& x, std::span<const double> signs,
                                       std::span<const double> weights, double l2_lambda) {
    const std::size_t d = x.cols();
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    HingeEvaluation ev;
    ev.gradient.assign(d + 1, 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const double margin = signs[r] * (x.dot(r, weights) + weights[d]);
        if (margin < 1.0) {
            ev.loss += (1.0 - margin) * inv_n;
            x.for_each_entry(r, [&](std::size_t c, double v) { ev.gradient[c] -= signs[r] * v * inv_n; });
            ev.gradient[d] -= signs[r] * inv_n;
        }
    }
    for (std::size_t c = 0; c < d; ++c) {
        ev.loss += 0.5 * l2_lambda * weights[c] * weights[c];
        ev.gradient[c] += l2_lambda * weights[c];
    }
    return ev;
}

/// One-vs-rest linear SVM. Each class's scorer runs `epochs` passes of SGD
/// over a seeded shuffle with step eta_0 / (1 + eta_0 * lambda * t).
inline LinearModel train_svm(const FeatureMatrix& x, std::span<const std::size_t> y, const ClassList& classes,
                             const SvmConfig& config = {}) {
    if (!(config.learning_rate > 0.0) || config.epochs == 0 || config.l2_lambda < 0.0) {
        throw Error("train_svm: invalid configuration");
    }
    if (config.learning_rate * config.l2_lambda >= 1.0) {
        throw Error("train_svm: learning_rate * l2_lambda must be below 1");
    }
    detail::check_training_inputs(x, y, classes.size(), true);
    const std::size_t d = x.cols();
    const std::size_t n = x.rows();
    std::vector<double> weights(classes.size() * (d + 1), 0.0);

    for (std::size_t k = 0; k < classes.size(); ++k) {
        std::vector<double> v(d, 0.0);  // w = scale * v
        double scale = 1.0;
        double bias = 0.0;
        std::uint64_t t = 0;
        Rng rng(derive_seed(config.seed, "svm/" + std::to_string(k)));
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);

        for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
            rng.shuffle(order);
            for (auto r : order) {
                const double eta =
                    config.learning_rate / (1.0 + config.learning_rate * config.l2_lambda * static_cast<double>(t));
                ++t;
                const double s = y[r] == k ? 1.0 : -1.0;
                const double margin = s * (scale * x.dot(r, v) + bias);
                scale *= 1.0 - eta * config.l2_lambda;
                if (margin < 1.0) {
                    const double step = eta * s / scale;
                    x.for_each_entry(r, [&](std::size_t c, double val) { v[c] += step * val; });
                    bias += eta * s;
                }
                if (scale < 1e-9) {
                    for (auto& vi : v) vi *= scale;
                    scale = 1.0;
                }
            }
        }
        double* out = weights.data() + k * (d + 1);
        for (std::size_t c = 0; c < d; ++c) out[c] = scale * v[c];
        out[d] = bias;
    }
    return LinearModel(LinearKind::svm, classes, d, std::move(weights));
}

}  // namespace climsent
