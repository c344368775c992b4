#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "teamdims/error.hpp"
#include "teamdims/label.hpp"

namespace teamdims {

// One chat line. `labels` is the adjudicated/primary annotation; `labels_b`
// is the second annotator's vector on doubly-annotated subsets and is only
// ever used for agreement, never for training. `feature_bits` is the audit
// trail written by featurize (one char per feature, canonical order).
struct AnnotatedMessage {
    std::string id;
    std::string team_id;
    std::string user;
    std::string text;
    LabelVector labels;
    std::optional<LabelVector> labels_b;
    std::optional<std::string> feature_bits;

    bool operator==(const AnnotatedMessage&) const = default;
};

struct Corpus {
    std::vector<AnnotatedMessage> messages;
    std::map<std::string, std::string> meta;

    std::size_t size() const { return messages.size(); }
    bool empty() const { return messages.empty(); }

    bool operator==(const Corpus&) const = default;
};

// ids must be unique and texts non-empty after stripping whitespace.
inline void validate_corpus(const Corpus& corpus) {
    std::unordered_set<std::string> seen;
    seen.reserve(corpus.messages.size());
    for (std::size_t i = 0; i < corpus.messages.size(); ++i) {
        const auto& m = corpus.messages[i];
        if (!seen.insert(m.id).second)
            throw validation_error("duplicate message id '" + m.id + "' (message " +
                                   std::to_string(i + 1) + ")");
        if (m.text.find_first_not_of(" \t\r\n") == std::string::npos)
            throw validation_error("message '" + m.id + "' has empty text");
    }
}

// Non-disjoint positive counts per dimension; a multi-label message
// contributes to each of its set dimensions.
inline std::array<std::size_t, 4> label_counts(const Corpus& corpus) {
    std::array<std::size_t, 4> counts{};
    for (const auto& m : corpus.messages)
        for (std::size_t i = 0; i < 4; ++i)
            counts[i] += m.labels.bits[i];
    return counts;
}

inline Corpus concat(const Corpus& a, const Corpus& b) {
    Corpus out = a;
    out.messages.insert(out.messages.end(), b.messages.begin(), b.messages.end());
    for (const auto& [k, v] : b.meta) out.meta.emplace(k, v);
    return out;
}

} // namespace teamdims
