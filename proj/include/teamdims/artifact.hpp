#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "teamdims/error.hpp"
#include "teamdims/features.hpp"
#include "teamdims/fingerprint.hpp"
#include "teamdims/fs.hpp"
#include "teamdims/postag.hpp"
#include "teamdims/preprocess.hpp"

namespace teamdims {

inline nlohmann::json load_json_file(const std::string& path) {
    std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
}

enum class ModelKind { rf, transformer };

inline std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::rf ? "rf" : "transformer";
}

// Reads the artifact's config.json to decide which loader applies.
inline ModelKind detect_model_kind(const std::string& artifact_dir) {
    nlohmann::json config = load_json_file(artifact_dir + "/config.json");
    std::string model;
    try {
        model = config.at("model").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(artifact_dir + "/config.json: " + e.what());
    }
    if (model == "rf") return ModelKind::rf;
    if (model == "transformer") return ModelKind::transformer;
    throw validation_error("unknown model kind '" + model + "' in " + artifact_dir);
}

// Advisory exclusive lock on an artifact directory, held for the lifetime of
// the object. Serializes concurrent writers of the same directory; readers
// do not take it.
class DirLock {
public:
    explicit DirLock(const std::string& dir) {
        std::filesystem::create_directories(dir);
        std::string path = dir + "/.lock";
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw io_error("cannot open lock file: " + path);
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            fd_ = -1;
            throw io_error("cannot lock artifact directory: " + dir);
        }
    }

    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

    ~DirLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }

private:
    int fd_ = -1;
};

// The text-preparation half of a trained artifact: the exact lexicon and
// feature rules the model saw, plus whether feature placeholders were
// injected. Saved alongside the weights so inference reproduces training
// preparation byte for byte.
class TextPipeline {
public:
    TextPipeline(Lexicon lexicon, FeaturePack pack, bool features)
        : lexicon_(std::move(lexicon)), pack_(std::move(pack)), features_(features) {}

    static TextPipeline load(const std::string& artifact_dir) {
        PipelineFingerprint fp =
            PipelineFingerprint::from_json(load_json_file(artifact_dir + "/pipeline_fingerprint.json"));
        Lexicon lexicon = load_lexicon(artifact_dir + "/lexicon.tsv");
        FeaturePack pack = load_feature_rules(artifact_dir + "/feature_rules.tsv");
        if (lexicon.fingerprint() != fp.lexicon)
            throw validation_error("lexicon.tsv does not match the stored pipeline fingerprint in " +
                                   artifact_dir);
        if (pack.fingerprint() != fp.feature_rules)
            throw validation_error(
                "feature_rules.tsv does not match the stored pipeline fingerprint in " + artifact_dir);
        return TextPipeline(std::move(lexicon), std::move(pack), fp.features);
    }

    void save(const std::string& artifact_dir) const {
        write_text_file(artifact_dir + "/lexicon.tsv", lexicon_.serialize_tsv());
        write_text_file(artifact_dir + "/feature_rules.tsv", pack_.serialize_tsv());
    }

    PipelineFingerprint fingerprint() const {
        return {lexicon_.fingerprint(), pack_.fingerprint(), features_};
    }

    std::string prepare_text(std::string_view raw) const {
        std::string text = preprocess_message(raw, lexicon_);
        if (features_) text = inject_features(text, extract_features(text, pack_, default_pos_tagger()));
        return text;
    }

    // Brings a corpus to the model's expected form, skipping stages its
    // metadata already stamps. Stamped-but-incompatible corpora are rejected.
    Corpus prepare(const Corpus& corpus) const {
        check_pipeline_compatibility(corpus, fingerprint());
        Corpus out = corpus;
        if (!flag(out, "preprocessed")) out = preprocess_corpus(out, lexicon_);
        if (features_ && !flag(out, "featurized"))
            out = featurize_corpus(out, pack_, default_pos_tagger());
        return out;
    }

    const Lexicon& lexicon() const { return lexicon_; }
    const FeaturePack& pack() const { return pack_; }
    bool features() const { return features_; }

private:
    static bool flag(const Corpus& corpus, const char* key) {
        auto it = corpus.meta.find(key);
        return it != corpus.meta.end() && it->second == "true";
    }

    Lexicon lexicon_;
    FeaturePack pack_;
    bool features_;
};

} // namespace teamdims
