#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "climsent/error.hpp"
#include "climsent/model.hpp"

namespace climsent {

/// counts[i][j]: documents of true class i predicted as class j.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts) {
            for (auto c : row) t += c;
        }
        return t;
    }
};

inline ConfusionMatrix confusion_matrix(std::span<const std::size_t> y_true, std::span<const std::size_t> y_pred,
                                        const std::vector<std::string>& classes) {
    if (y_true.size() != y_pred.size()) {
        throw Error("confusion_matrix: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                    std::to_string(y_pred.size()) + ")");
    }
    const std::size_t k = classes.size();
    ConfusionMatrix cm{classes, std::vector<std::vector<std::size_t>>(k, std::vector<std::size_t>(k, 0))};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] >= k || y_pred[i] >= k) throw Error("confusion_matrix: unknown label at position " + std::to_string(i));
        ++cm.counts[y_true[i]][y_pred[i]];
    }
    return cm;
}

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct EvalReport {
    std::string encoder;
    std::string model;
    double accuracy = 0.0;
    double precision = 0.0;  // support-weighted
    double recall = 0.0;     // support-weighted, equal to accuracy
    double f1 = 0.0;         // support-weighted
    std::vector<ClassMetrics> per_class;
    ConfusionMatrix confusion;
};

/// Per-class precision / recall / F1 (0 on a zero denominator) and their
/// support-weighted means.
inline EvalReport metrics(const ConfusionMatrix& cm, std::string encoder = {}, std::string model = {}) {
    const std::size_t total = cm.total();
    if (total == 0) throw Error("metrics: empty confusion matrix");
    const std::size_t k = cm.classes.size();
    EvalReport rep;
    rep.encoder = std::move(encoder);
    rep.model = std::move(model);
    rep.confusion = cm;

    std::size_t trace = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t tp = cm.counts[i][i];
        std::size_t support = 0, predicted = 0;
        for (std::size_t j = 0; j < k; ++j) {
            support += cm.counts[i][j];
            predicted += cm.counts[j][i];
        }
        trace += tp;
        ClassMetrics m;
        m.label = cm.classes[i];
        m.support = support;
        m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        m.recall = support ? static_cast<double>(tp) / static_cast<double>(support) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        const double w = static_cast<double>(support) / static_cast<double>(total);
        rep.precision += w * m.precision;
        rep.recall += w * m.recall;
        rep.f1 += w * m.f1;
        rep.per_class.push_back(std::move(m));
    }
    rep.accuracy = static_cast<double>(trace) / static_cast<double>(total);
    return rep;
}

struct FormattedResults {
    std::string text;  // one fixed-width table per encoder
    std::string csv;   // encoder,model,accuracy,precision,recall,f1
};

namespace detail {

inline std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

inline std::size_t model_rank(const std::string& model) {
    for (std::size_t i = 0; i < kAllModelKinds.size(); ++i) {
        if (model == to_string(kAllModelKinds[i]) || model == display_name(kAllModelKinds[i])) return i;
    }
    return kAllModelKinds.size();
}

inline std::string model_label(const std::string& model) {
    const auto rank = model_rank(model);
    return rank < kAllModelKinds.size() ? display_name(kAllModelKinds[rank]) : model;
}

}  // namespace detail

/// Tables are emitted in encoder-name order with rows RF, SVM, DT, LR and
/// metrics as percentages to two decimals. CSV rows keep the input order and
/// carry fractions to six decimals.
inline FormattedResults format_results(std::span<const EvalReport> reports) {
    FormattedResults out;
    out.csv = "encoder,model,accuracy,precision,recall,f1\n";
    for (const auto& r : reports) {
        out.csv += csv::escape_field(r.encoder) + ',' + csv::escape_field(r.model) + ',' + detail::fixed(r.accuracy, 6) +
                   ',' + detail::fixed(r.precision, 6) + ',' + detail::fixed(r.recall, 6) + ',' +
                   detail::fixed(r.f1, 6) + '\n';
    }

    std::map<std::string, std::vector<const EvalReport*>> by_encoder;
    for (const auto& r : reports) by_encoder[r.encoder].push_back(&r);
    bool first = true;
    for (auto& [encoder, rows] : by_encoder) {
        std::stable_sort(rows.begin(), rows.end(), [](const EvalReport* a, const EvalReport* b) {
            return detail::model_rank(a->model) < detail::model_rank(b->model);
        });
        if (!first) out.text += '\n';
        first = false;
        out.text += "Encoder: " + encoder + '\n';
        out.text += detail::pad_right("Model", 8) + detail::pad_left("Accuracy", 10) + detail::pad_left("Precision", 11) +
                    detail::pad_left("Recall", 10) + detail::pad_left("F-measure", 11) + '\n';
        for (const auto* r : rows) {
            out.text += detail::pad_right(detail::model_label(r->model), 8) +
                        detail::pad_left(detail::fixed(100.0 * r->accuracy, 2), 10) +
                        detail::pad_left(detail::fixed(100.0 * r->precision, 2), 11) +
                        detail::pad_left(detail::fixed(100.0 * r->recall, 2), 10) +
                        detail::pad_left(detail::fixed(100.0 * r->f1, 2), 11) + '\n';
        }
    }
    return out;
}

}  // namespace climsent
