#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "teamdims/corpus.hpp"
#include "teamdims/error.hpp"
#include "teamdims/label.hpp"

namespace teamdims {

// kappa = (p_o - p_e) / (1 - p_e). When p_e = 1 both raters are constant and
// identical, which forces p_o = 1; the conventional value 1.0 is returned and
// flagged so reports can mark it as degenerate.
struct KappaResult {
    double value = 0.0;
    bool degenerate = false;
};

inline KappaResult cohen_kappa(std::span<const std::uint8_t> a,
                               std::span<const std::uint8_t> b) {
    if (a.size() != b.size())
        throw validation_error("cohen_kappa: sequence lengths differ (" +
                               std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                               ")");
    if (a.empty()) throw validation_error("cohen_kappa: empty input");

    // 2x2 contingency counts over binary decisions
    std::size_t n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        bool x = a[i] != 0, y = b[i] != 0;
        if (x && y) ++n11;
        else if (x && !y) ++n10;
        else if (!x && y) ++n01;
        else ++n00;
    }
    double n = static_cast<double>(a.size());
    double p_o = (static_cast<double>(n11) + static_cast<double>(n00)) / n;
    double pa1 = (static_cast<double>(n11) + static_cast<double>(n10)) / n;
    double pb1 = (static_cast<double>(n11) + static_cast<double>(n01)) / n;
    double p_e = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);

    if (p_e >= 1.0 - 1e-15) {
        // constant, identical marginals; observed agreement decides
        return {p_o >= 1.0 - 1e-15 ? 1.0 : 0.0, true};
    }
    return {(p_o - p_e) / (1.0 - p_e), false};
}

inline KappaResult cohen_kappa(const std::vector<std::uint8_t>& a,
                               const std::vector<std::uint8_t>& b) {
    return cohen_kappa(std::span<const std::uint8_t>(a), std::span<const std::uint8_t>(b));
}

struct AgreementReport {
    std::array<KappaResult, 4> per_dimension{};
    KappaResult pooled{}; // over the flattened 4N binary decisions
};

namespace detail {

inline AgreementReport agreement_from_columns(
    const std::array<std::vector<std::uint8_t>, 4>& a,
    const std::array<std::vector<std::uint8_t>, 4>& b) {
    AgreementReport report;
    std::vector<std::uint8_t> flat_a, flat_b;
    for (std::size_t d = 0; d < 4; ++d) {
        report.per_dimension[d] = cohen_kappa(a[d], b[d]);
        flat_a.insert(flat_a.end(), a[d].begin(), a[d].end());
        flat_b.insert(flat_b.end(), b[d].begin(), b[d].end());
    }
    report.pooled = cohen_kappa(flat_a, flat_b);
    return report;
}

} // namespace detail

// Annotator agreement: labels vs labels_b. Every message must carry a second
// annotation.
inline AgreementReport agreement_report(const Corpus& corpus) {
    std::array<std::vector<std::uint8_t>, 4> a, b;
    for (const auto& m : corpus.messages) {
        if (!m.labels_b)
            throw validation_error("message '" + m.id +
                                   "' has no second annotation (labels_b)");
        for (std::size_t d = 0; d < 4; ++d) {
            a[d].push_back(m.labels.bits[d]);
            b[d].push_back(m.labels_b->bits[d]);
        }
    }
    if (corpus.empty()) throw validation_error("agreement_report: empty corpus");
    return detail::agreement_from_columns(a, b);
}

// Model-vs-human agreement: gold labels vs a supplied prediction set.
inline AgreementReport agreement_report(const Corpus& corpus,
                                        const std::vector<LabelVector>& predictions) {
    if (corpus.size() != predictions.size())
        throw validation_error("agreement_report: prediction count (" +
                               std::to_string(predictions.size()) + ") != corpus size (" +
                               std::to_string(corpus.size()) + ")");
    if (corpus.empty()) throw validation_error("agreement_report: empty corpus");
    std::array<std::vector<std::uint8_t>, 4> a, b;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        for (std::size_t d = 0; d < 4; ++d) {
            a[d].push_back(corpus.messages[i].labels.bits[d]);
            b[d].push_back(predictions[i].bits[d]);
        }
    }
    return detail::agreement_from_columns(a, b);
}

} // namespace teamdims
