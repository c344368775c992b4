#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "teamdims/corpus.hpp"
#include "teamdims/error.hpp"
#include "teamdims/fingerprint.hpp"
#include "teamdims/fs.hpp"
#include "teamdims/label.hpp"
#include "teamdims/random_forest.hpp"
#include "teamdims/rng.hpp"
#include "teamdims/tfidf.hpp"

namespace teamdims {

struct BaselineConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0; // 0 = unlimited
    std::size_t min_leaf = 1;
    std::uint64_t seed = 0;
    double threshold = 0.5;
};

// TF-IDF + one-vs-rest random forests, one per dimension. Each forest draws
// its randomness from substream_seed(seed, dimension_index), so retraining
// one dimension's labels cannot perturb the other three.
class BaselineModel {
public:
    BaselineModel() = default;

    static BaselineModel train(const Corpus& corpus, const BaselineConfig& config,
                               PipelineFingerprint fingerprint = {}) {
        if (corpus.empty()) throw validation_error("baseline train: empty corpus");
        BaselineModel model;
        model.config_ = config;
        model.fingerprint_ = std::move(fingerprint);
        model.tfidf_ = TfidfModel::fit(corpus);

        std::vector<std::vector<double>> x;
        x.reserve(corpus.size());
        for (const auto& msg : corpus.messages)
            x.push_back(to_dense(model.tfidf_.transform(msg.text), model.tfidf_.vocab_size()));

        for (std::size_t d = 0; d < kNumDimensions; ++d) {
            std::vector<std::uint8_t> y;
            y.reserve(corpus.size());
            for (const auto& msg : corpus.messages) y.push_back(msg.labels[kDimensions[d]]);
            ForestConfig fc{config.n_trees, config.max_depth, config.min_leaf,
                            substream_seed(config.seed, d)};
            model.forests_[d] = RandomForest::fit(x, y, fc);
        }
        return model;
    }

    std::array<double, kNumDimensions> predict_scores(const std::string& text) const {
        auto row = to_dense(tfidf_.transform(text), tfidf_.vocab_size());
        std::array<double, kNumDimensions> scores{};
        for (std::size_t d = 0; d < kNumDimensions; ++d) scores[d] = forests_[d].score(row);
        return scores;
    }

    LabelVector predict(const std::string& text) const {
        auto scores = predict_scores(text);
        LabelVector labels;
        for (std::size_t d = 0; d < kNumDimensions; ++d)
            labels.bits[d] = scores[d] >= config_.threshold ? 1 : 0;
        return labels;
    }

    // Texts must already be prepared with the pipeline this model was
    // trained under; stamped corpus metadata is checked against the stored
    // fingerprint.
    std::vector<LabelVector> predict_corpus(const Corpus& corpus) const {
        check_pipeline_compatibility(corpus, fingerprint_);
        std::vector<LabelVector> out;
        out.reserve(corpus.size());
        for (const auto& msg : corpus.messages) out.push_back(predict(msg.text));
        return out;
    }

    std::array<bool, kNumDimensions> constant_flags() const {
        std::array<bool, kNumDimensions> flags{};
        for (std::size_t d = 0; d < kNumDimensions; ++d) flags[d] = forests_[d].constant();
        return flags;
    }

    const TfidfModel& tfidf() const { return tfidf_; }
    const RandomForest& forest(Dimension dim) const {
        return forests_[static_cast<std::size_t>(dim)];
    }
    const BaselineConfig& config() const { return config_; }
    const PipelineFingerprint& fingerprint() const { return fingerprint_; }

    void save(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        write_text_file(dir / "tfidf.json", tfidf_.to_json().dump());
        for (std::size_t d = 0; d < kNumDimensions; ++d) {
            std::string name = "forest_" + std::string(to_string(kDimensions[d])) + ".json";
            write_text_file(dir / name, forests_[d].to_json().dump());
        }
        nlohmann::json config = {{"model", "rf"},
                                 {"n_trees", config_.n_trees},
                                 {"max_depth", config_.max_depth},
                                 {"min_leaf", config_.min_leaf},
                                 {"seed", config_.seed},
                                 {"threshold", config_.threshold}};
        write_text_file(dir / "config.json", config.dump(2) + "\n");
        write_text_file(dir / "pipeline_fingerprint.json", fingerprint_.to_json().dump(2) + "\n");
    }

    static BaselineModel load(const std::filesystem::path& dir) {
        BaselineModel model;
        nlohmann::json config;
        try {
            config = nlohmann::json::parse(read_text_file(dir / "config.json"));
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("config.json: ") + e.what());
        }
        if (config.at("model").get<std::string>() != "rf")
            throw validation_error("artifact at " + dir.string() + " is not a baseline model");
        model.config_.n_trees = config.at("n_trees").get<std::size_t>();
        model.config_.max_depth = config.at("max_depth").get<std::size_t>();
        model.config_.min_leaf = config.at("min_leaf").get<std::size_t>();
        model.config_.seed = config.at("seed").get<std::uint64_t>();
        model.config_.threshold = config.at("threshold").get<double>();
        try {
            model.tfidf_ =
                TfidfModel::from_json(nlohmann::json::parse(read_text_file(dir / "tfidf.json")));
            for (std::size_t d = 0; d < kNumDimensions; ++d) {
                std::string name = "forest_" + std::string(to_string(kDimensions[d])) + ".json";
                model.forests_[d] =
                    RandomForest::from_json(nlohmann::json::parse(read_text_file(dir / name)));
            }
            model.fingerprint_ = PipelineFingerprint::from_json(
                nlohmann::json::parse(read_text_file(dir / "pipeline_fingerprint.json")));
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("baseline artifact: ") + e.what());
        }
        return model;
    }

private:
    static std::vector<double> to_dense(const SparseVector& sparse, std::size_t size) {
        std::vector<double> row(size, 0.0);
        for (const auto& [col, value] : sparse) row[col] = value;
        return row;
    }

    TfidfModel tfidf_;
    std::array<RandomForest, kNumDimensions> forests_;
    BaselineConfig config_;
    PipelineFingerprint fingerprint_;
};

} // namespace teamdims
