#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamdims/error.hpp"
#include "teamdims/label.hpp"

namespace teamdims {

// Binary counts and derived scores for one dimension. `degenerate` is set
// when any of P/R/F1 hit a 0/0 and were defined to 0 by convention.
struct DimensionMetrics {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    bool degenerate = false;
};

struct MetricsReport {
    std::array<DimensionMetrics, 4> per_dimension{};
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double hamming_loss = 0.0;
    std::size_t n_messages = 0;
};

inline MetricsReport evaluate(const std::vector<LabelVector>& preds,
                              const std::vector<LabelVector>& golds) {
    if (preds.size() != golds.size())
        throw validation_error("evaluate: prediction count (" + std::to_string(preds.size()) +
                               ") != gold count (" + std::to_string(golds.size()) + ")");
    if (preds.empty()) throw validation_error("evaluate: empty input");

    MetricsReport report;
    report.n_messages = preds.size();
    std::size_t mismatches = 0;

    for (std::size_t d = 0; d < kNumDimensions; ++d) {
        DimensionMetrics& m = report.per_dimension[d];
        for (std::size_t i = 0; i < preds.size(); ++i) {
            bool p = preds[i].bits[d] != 0, g = golds[i].bits[d] != 0;
            if (p && g) ++m.tp;
            else if (p && !g) ++m.fp;
            else if (!p && g) ++m.fn;
            else ++m.tn;
            if (p != g) ++mismatches;
        }
        if (m.tp + m.fp == 0) {
            m.precision = 0.0;
            m.degenerate = true;
        } else {
            m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
        }
        if (m.tp + m.fn == 0) {
            m.recall = 0.0;
            m.degenerate = true;
        } else {
            m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
        }
        if (m.precision + m.recall == 0.0) {
            m.f1 = 0.0; // 2PR/(P+R) is 0/0 here
            m.degenerate = true;
        } else {
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        }
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_f1 += m.f1;
    }
    report.macro_precision /= static_cast<double>(kNumDimensions);
    report.macro_recall /= static_cast<double>(kNumDimensions);
    report.macro_f1 /= static_cast<double>(kNumDimensions);
    report.hamming_loss = static_cast<double>(mismatches) /
                          (static_cast<double>(kNumDimensions) * static_cast<double>(preds.size()));
    return report;
}

inline nlohmann::json to_json(const MetricsReport& r) {
    nlohmann::json per_dim = nlohmann::json::object();
    for (std::size_t d = 0; d < kNumDimensions; ++d) {
        const DimensionMetrics& m = r.per_dimension[d];
        per_dim[std::string(to_string(kDimensions[d]))] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
            {"tp", m.tp},               {"fp", m.fp},         {"fn", m.fn},
            {"tn", m.tn},               {"degenerate", m.degenerate},
        };
    }
    return {
        {"macro_precision", r.macro_precision},
        {"macro_recall", r.macro_recall},
        {"macro_f1", r.macro_f1},
        {"hamming_loss", r.hamming_loss},
        {"n_messages", r.n_messages},
        {"per_dimension", per_dim},
    };
}

} // namespace teamdims
