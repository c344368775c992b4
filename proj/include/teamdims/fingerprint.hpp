#pragma once

#include <string>

#include <json.hpp>

#include "teamdims/corpus.hpp"
#include "teamdims/error.hpp"

namespace teamdims {

// Identifies the text-preparation pipeline a model was trained with. Stored
// next to the model weights; inputs prepared under a different lexicon or
// rule pack are rejected instead of silently producing garbage.
struct PipelineFingerprint {
    std::string lexicon;       // content hash of the normalization lexicon
    std::string feature_rules; // content hash of the feature rule pack
    bool features = false;     // were feature placeholders injected at train time

    bool operator==(const PipelineFingerprint&) const = default;

    nlohmann::json to_json() const {
        return {{"lexicon", lexicon}, {"feature_rules", feature_rules}, {"features", features}};
    }

    static PipelineFingerprint from_json(const nlohmann::json& obj) {
        PipelineFingerprint fp;
        fp.lexicon = obj.at("lexicon").get<std::string>();
        fp.feature_rules = obj.at("feature_rules").get<std::string>();
        fp.features = obj.at("features").get<bool>();
        return fp;
    }
};

// Throws if corpus metadata records a pipeline incompatible with `fp`.
// Absent metadata passes: the caller is then responsible for preparing the
// text itself (and will use the artifact's own lexicon/rules to do so).
inline void check_pipeline_compatibility(const Corpus& corpus, const PipelineFingerprint& fp) {
    auto it = corpus.meta.find("lexicon_fingerprint");
    if (it != corpus.meta.end() && !fp.lexicon.empty() && it->second != fp.lexicon)
        throw validation_error("pipeline fingerprint mismatch: corpus was normalized with a "
                               "different lexicon than the model was trained with");

    auto feat = corpus.meta.find("featurized");
    bool corpus_featurized = feat != corpus.meta.end() && feat->second == "true";
    if (corpus_featurized && !fp.features)
        throw validation_error("pipeline fingerprint mismatch: corpus has injected feature "
                               "placeholders but the model was trained with features off");
    if (corpus_featurized && fp.features) {
        auto rf = corpus.meta.find("feature_rules_fingerprint");
        if (rf != corpus.meta.end() && !fp.feature_rules.empty() && rf->second != fp.feature_rules)
            throw validation_error("pipeline fingerprint mismatch: corpus was featurized with a "
                                   "different rule pack than the model was trained with");
    }
}

} // namespace teamdims
