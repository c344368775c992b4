#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamdims/error.hpp"
#include "teamdims/kappa.hpp"
#include "teamdims/label.hpp"
#include "teamdims/metrics.hpp"

namespace teamdims {

inline nlohmann::json to_json(const KappaResult& k) {
    return {{"value", k.value}, {"degenerate", k.degenerate}};
}

// Agreement between two annotation columns (or model vs gold), with enough
// provenance to tell which inputs produced it.
inline nlohmann::json to_json(const AgreementReport& r) {
    nlohmann::json per = nlohmann::json::object();
    for (std::size_t d = 0; d < kNumDimensions; ++d)
        per[std::string(to_string(kDimensions[d]))] = to_json(r.per_dimension[d]);
    return {{"kappa_pooled", to_json(r.pooled)}, {"kappa_per_dimension", per}};
}

struct ComparisonCell {
    std::string label;    // column heading, e.g. "rf" or "transformer+features"
    std::string artifact; // directory the model was loaded from
    MetricsReport metrics;
};

// Several models scored on one identical test partition, rendered as a
// metric-by-model table. Higher is better everywhere except Hamming loss.
struct ComparisonReport {
    std::vector<ComparisonCell> cells;
    std::string test_path;
    std::string test_hash;

    nlohmann::json to_json() const {
        nlohmann::json models = nlohmann::json::array();
        for (const auto& c : cells)
            models.push_back({{"label", c.label},
                              {"artifact", c.artifact},
                              {"metrics", teamdims::to_json(c.metrics)}});
        return {{"test_path", test_path}, {"test_hash", test_hash}, {"models", models}};
    }

    std::string render_table() const {
        if (cells.empty()) throw validation_error("comparison report has no models");
        struct Row {
            const char* name;
            bool lower_is_better;
            std::vector<double> values;
        };
        std::array<Row, 4> rows = {Row{"macro_precision", false, {}},
                                   Row{"macro_recall", false, {}},
                                   Row{"macro_f1", false, {}},
                                   Row{"hamming_loss", true, {}}};
        for (const auto& c : cells) {
            rows[0].values.push_back(c.metrics.macro_precision);
            rows[1].values.push_back(c.metrics.macro_recall);
            rows[2].values.push_back(c.metrics.macro_f1);
            rows[3].values.push_back(c.metrics.hamming_loss);
        }

        std::size_t name_width = std::string("metric").size();
        for (const auto& r : rows) name_width = std::max(name_width, std::string(r.name).size());
        std::vector<std::size_t> widths;
        for (const auto& c : cells) widths.push_back(std::max<std::size_t>(c.label.size(), 7));

        std::string out = pad("metric", name_width);
        for (std::size_t i = 0; i < cells.size(); ++i) out += "  " + pad(cells[i].label, widths[i]);
        out += '\n';
        for (const auto& r : rows) {
            double best = r.lower_is_better
                              ? *std::min_element(r.values.begin(), r.values.end())
                              : *std::max_element(r.values.begin(), r.values.end());
            out += pad(r.name, name_width);
            for (std::size_t i = 0; i < r.values.size(); ++i) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4f%s", r.values[i],
                              r.values[i] == best ? "*" : " ");
                out += "  " + pad(buf, widths[i]);
            }
            out += '\n';
        }
        out += "(*) best per row; test: " + test_path + "\n";
        return out;
    }

private:
    static std::string pad(std::string s, std::size_t width) {
        if (s.size() < width) s.append(width - s.size(), ' ');
        return s;
    }
};

} // namespace teamdims
