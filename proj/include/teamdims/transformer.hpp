#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "teamdims/adamw.hpp"
#include "teamdims/corpus.hpp"
#include "teamdims/encoder.hpp"
#include "teamdims/error.hpp"
#include "teamdims/fingerprint.hpp"
#include "teamdims/fs.hpp"
#include "teamdims/label.hpp"
#include "teamdims/metrics.hpp"
#include "teamdims/rng.hpp"
#include "teamdims/schedule.hpp"
#include "teamdims/wordpiece.hpp"

namespace teamdims {

struct TrainConfig {
    double peak_lr = 2e-5;  // fine-tuning scale; from-scratch presets want ~1e-3
    double warmup = 1.0 / 3.0; // fraction of one epoch
    ScheduleKind schedule = ScheduleKind::linear_decay;
    std::size_t max_epochs = 100;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    double threshold = 0.5;
    std::size_t early_stop_patience = 5; // epochs without val-loss improvement
    std::size_t vocab_budget = 4096;
    AdamWConfig adamw{};
};

struct TrainingLogEntry {
    std::size_t epoch = 0; // 1-based
    std::size_t step = 0;  // optimizer steps taken so far
    double learning_rate = 0.0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_macro_f1 = 0.0;

    nlohmann::json to_json() const {
        return {{"epoch", epoch},           {"step", step},
                {"learning_rate", learning_rate}, {"train_loss", train_loss},
                {"val_loss", val_loss},     {"val_macro_f1", val_macro_f1}};
    }

    static TrainingLogEntry from_json(const nlohmann::json& obj) {
        TrainingLogEntry e;
        e.epoch = obj.at("epoch").get<std::size_t>();
        e.step = obj.at("step").get<std::size_t>();
        e.learning_rate = obj.at("learning_rate").get<double>();
        e.train_loss = obj.at("train_loss").get<double>();
        e.val_loss = obj.at("val_loss").get<double>();
        e.val_macro_f1 = obj.at("val_macro_f1").get<double>();
        return e;
    }
};

namespace detail {

inline double stable_sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// binary cross-entropy with logits, numerically stable form
inline double bce_logits(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

} // namespace detail

struct ResolvedEncoder {
    Encoder encoder;
    WordPieceTokenizer tokenizer;
    bool pretrained = false;
};

// Encoder ids resolve in order: an existing directory holding a native
// checkpoint, $TEAMDIMS_CACHE/<id>/, then the built-in presets (randomly
// initialized from the training seed — no network access anywhere).
inline ResolvedEncoder resolve_encoder(const std::string& id,
                                       const std::vector<std::string>& train_texts,
                                       const TrainConfig& config) {
    namespace fs = std::filesystem;
    auto load_dir = [](const fs::path& dir) {
        ResolvedEncoder r;
        r.encoder = Encoder::from_json(nlohmann::json::parse(read_text_file(dir / "encoder.json")));
        r.tokenizer = WordPieceTokenizer::load(dir / "vocab.txt");
        if (r.tokenizer.vocab_size() != r.encoder.spec().vocab)
            throw validation_error("encoder checkpoint " + dir.string() +
                                   ": tokenizer vocab does not match encoder spec");
        r.pretrained = true;
        return r;
    };

    if (fs::exists(fs::path(id) / "encoder.json")) return load_dir(id);
    if (const char* cache = std::getenv("TEAMDIMS_CACHE")) {
        fs::path cached = fs::path(cache) / id;
        if (fs::exists(cached / "encoder.json")) return load_dir(cached);
    }
    if (auto spec = preset_encoder_spec(id)) {
        ResolvedEncoder r;
        r.tokenizer = WordPieceTokenizer::fit(train_texts, config.vocab_budget);
        spec->vocab = r.tokenizer.vocab_size();
        r.encoder = Encoder(*spec, substream_seed(config.seed, 7));
        return r;
    }
    throw validation_error("unknown encoder '" + id +
                           "': not a checkpoint directory, not in $TEAMDIMS_CACHE, and not a "
                           "built-in preset (mini-cased, tiny-cased)");
}

// Multilabel classifier: encoder pooled output -> 4 logits, trained with
// per-label binary cross-entropy and AdamW under a warmup/decay schedule.
// Rows of the head weight follow the canonical dimension order.
class TransformerModel {
public:
    TransformerModel() = default;

    // Untrained model around an existing encoder/tokenizer pair; the head is
    // freshly initialized from the config seed.
    static TransformerModel fresh(WordPieceTokenizer tokenizer, Encoder encoder,
                                  const TrainConfig& config, std::string encoder_id = "custom",
                                  PipelineFingerprint fingerprint = {}) {
        if (tokenizer.vocab_size() != encoder.spec().vocab)
            throw validation_error("fresh model: tokenizer/encoder vocab mismatch");
        TransformerModel model;
        model.tokenizer_ = std::move(tokenizer);
        model.encoder_ = std::move(encoder);
        model.config_ = config;
        model.encoder_id_ = std::move(encoder_id);
        model.fingerprint_ = std::move(fingerprint);
        model.init_head(substream_seed(config.seed, 8));
        return model;
    }

    static TransformerModel train(const Corpus& train_corpus, const Corpus& val_corpus,
                                  const TrainConfig& config, const std::string& encoder_id,
                                  PipelineFingerprint fingerprint = {}) {
        if (train_corpus.empty()) throw validation_error("transformer train: empty train corpus");
        if (val_corpus.empty()) throw validation_error("transformer train: empty val corpus");
        if (config.batch_size == 0)
            throw validation_error("transformer train: batch_size must be >= 1");
        if (config.max_epochs == 0)
            throw validation_error("transformer train: max_epochs must be >= 1");

        TransformerModel model;
        model.config_ = config;
        model.encoder_id_ = encoder_id;
        model.fingerprint_ = std::move(fingerprint);

        std::vector<std::string> texts;
        texts.reserve(train_corpus.size());
        for (const auto& m : train_corpus.messages) texts.push_back(m.text);
        ResolvedEncoder resolved = resolve_encoder(encoder_id, texts, config);
        model.encoder_ = std::move(resolved.encoder);
        model.tokenizer_ = std::move(resolved.tokenizer);
        model.init_head(substream_seed(config.seed, 8));

        const std::size_t n = train_corpus.size();
        std::vector<std::vector<int>> train_ids(n), val_ids(val_corpus.size());
        for (std::size_t i = 0; i < n; ++i)
            train_ids[i] =
                model.tokenizer_.encode(train_corpus.messages[i].text, model.max_seq_len());
        for (std::size_t i = 0; i < val_corpus.size(); ++i)
            val_ids[i] =
                model.tokenizer_.encode(val_corpus.messages[i].text, model.max_seq_len());

        const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
        const std::size_t total_steps = steps_per_epoch * config.max_epochs;
        std::size_t warmup_steps = static_cast<std::size_t>(
            std::llround(config.warmup * static_cast<double>(steps_per_epoch)));
        warmup_steps = std::min(warmup_steps, total_steps - 1);

        auto params = model.parameters();
        AdamW optimizer(params, config.adamw);
        Rng order_rng(substream_seed(config.seed, 11));
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;

        double best_val_loss = std::numeric_limits<double>::infinity();
        std::vector<Eigen::MatrixXd> best_checkpoint;
        std::size_t epochs_without_improvement = 0;
        std::size_t global_step = 0;
        double last_lr = 0.0;

        for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
            shuffle(order, order_rng);
            double epoch_loss_sum = 0.0;
            for (std::size_t start = 0; start < n; start += config.batch_size) {
                std::size_t stop = std::min(n, start + config.batch_size);
                model.zero_grads();
                double batch_loss = 0.0;
                for (std::size_t b = start; b < stop; ++b) {
                    std::size_t i = order[b];
                    batch_loss += model.accumulate_example(
                        train_ids[i], train_corpus.messages[i].labels,
                        1.0 / static_cast<double>(stop - start));
                }
                batch_loss /= static_cast<double>(stop - start);
                epoch_loss_sum += batch_loss * static_cast<double>(stop - start);
                last_lr = learning_rate(global_step, config.peak_lr, warmup_steps, total_steps,
                                        config.schedule);
                optimizer.step(params, last_lr);
                ++global_step;
            }

            double val_loss = 0.0;
            std::vector<LabelVector> val_preds;
            val_preds.reserve(val_ids.size());
            for (std::size_t i = 0; i < val_ids.size(); ++i) {
                Eigen::VectorXd z = model.logits_for_ids(val_ids[i]);
                double msg_loss = 0.0;
                LabelVector bits;
                for (std::size_t d = 0; d < kNumDimensions; ++d) {
                    auto idx = static_cast<Eigen::Index>(d);
                    msg_loss += detail::bce_logits(
                        z(idx), static_cast<double>(val_corpus.messages[i].labels.bits[d]));
                    bits.bits[d] = detail::stable_sigmoid(z(idx)) >= config.threshold ? 1 : 0;
                }
                val_loss += msg_loss / static_cast<double>(kNumDimensions);
                val_preds.push_back(bits);
            }
            val_loss /= static_cast<double>(val_ids.size());
            std::vector<LabelVector> val_golds;
            for (const auto& m : val_corpus.messages) val_golds.push_back(m.labels);
            double val_f1 = teamdims::evaluate(val_preds, val_golds).macro_f1;

            TrainingLogEntry entry;
            entry.epoch = epoch;
            entry.step = global_step;
            entry.learning_rate = last_lr;
            entry.train_loss = epoch_loss_sum / static_cast<double>(n);
            entry.val_loss = val_loss;
            entry.val_macro_f1 = val_f1;
            model.log_.push_back(entry);

            if (val_loss < best_val_loss) {
                best_val_loss = val_loss;
                best_checkpoint.clear();
                for (Param* p : params) best_checkpoint.push_back(p->v);
                epochs_without_improvement = 0;
            } else if (++epochs_without_improvement >= config.early_stop_patience) {
                break;
            }
        }

        if (!best_checkpoint.empty())
            for (std::size_t i = 0; i < params.size(); ++i) params[i]->v = best_checkpoint[i];
        return model;
    }

    std::array<double, kNumDimensions> predict_probs(const std::string& text) {
        return probs_for_ids(tokenizer_.encode(text, max_seq_len()));
    }

    LabelVector predict(const std::string& text) {
        auto probs = predict_probs(text);
        LabelVector labels;
        for (std::size_t d = 0; d < kNumDimensions; ++d)
            labels.bits[d] = probs[d] >= config_.threshold ? 1 : 0;
        return labels;
    }

    std::vector<LabelVector> predict_corpus(const Corpus& corpus) {
        check_pipeline_compatibility(corpus, fingerprint_);
        std::vector<LabelVector> out;
        out.reserve(corpus.size());
        for (const auto& m : corpus.messages) out.push_back(predict(m.text));
        return out;
    }

    // Mean over messages of the per-label-averaged BCE; no gradients touched.
    double compute_loss(const Corpus& corpus) {
        if (corpus.empty()) throw validation_error("compute_loss: empty corpus");
        double total = 0.0;
        for (const auto& m : corpus.messages) {
            auto ids = tokenizer_.encode(m.text, max_seq_len());
            Eigen::VectorXd z = logits_for_ids(ids);
            double msg = 0.0;
            for (std::size_t d = 0; d < kNumDimensions; ++d)
                msg += detail::bce_logits(z(static_cast<Eigen::Index>(d)),
                                          static_cast<double>(m.labels.bits[d]));
            total += msg / static_cast<double>(kNumDimensions);
        }
        return total / static_cast<double>(corpus.size());
    }

    // Zeroes gradients, then accumulates d(mean loss)/d(params) over the
    // corpus. Returns the loss. Used by tests for finite-difference checks.
    double compute_gradients(const Corpus& corpus) {
        if (corpus.empty()) throw validation_error("compute_gradients: empty corpus");
        zero_grads();
        double total = 0.0;
        double weight = 1.0 / static_cast<double>(corpus.size());
        for (const auto& m : corpus.messages) {
            auto ids = tokenizer_.encode(m.text, max_seq_len());
            total += accumulate_example(ids, m.labels, weight);
        }
        return total / static_cast<double>(corpus.size());
    }

    void zero_grads() {
        encoder_.zero_grads();
        head_w_.g.setZero();
        head_b_.g.setZero();
    }

    std::vector<Param*> parameters() {
        auto out = encoder_.params();
        out.push_back(&head_w_);
        out.push_back(&head_b_);
        return out;
    }

    Encoder& encoder() { return encoder_; }
    const WordPieceTokenizer& tokenizer() const { return tokenizer_; }
    const TrainConfig& config() const { return config_; }
    const PipelineFingerprint& fingerprint() const { return fingerprint_; }
    const std::string& encoder_id() const { return encoder_id_; }
    const std::vector<TrainingLogEntry>& log() const { return log_; }
    Param& head_weight() { return head_w_; }
    Param& head_bias() { return head_b_; }
    std::size_t max_seq_len() const { return encoder_.spec().max_seq_len; }

    void save(const std::filesystem::path& dir) {
        std::filesystem::create_directories(dir);
        write_text_file(dir / "encoder.json", encoder_.to_json().dump());
        tokenizer_.save(dir / "vocab.txt");

        nlohmann::json head = nlohmann::json::object();
        nlohmann::json weight = nlohmann::json::array();
        for (Eigen::Index r = 0; r < head_w_.v.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < head_w_.v.cols(); ++c) row.push_back(head_w_.v(r, c));
            weight.push_back(std::move(row));
        }
        nlohmann::json bias = nlohmann::json::array();
        for (Eigen::Index r = 0; r < head_b_.v.rows(); ++r) bias.push_back(head_b_.v(r, 0));
        head["weight"] = std::move(weight); // row order = COD, MPM, CCF, TES
        head["bias"] = std::move(bias);
        write_text_file(dir / "head.json", head.dump());

        nlohmann::json config = {{"model", "transformer"},
                                 {"encoder_id", encoder_id_},
                                 {"peak_lr", config_.peak_lr},
                                 {"warmup", config_.warmup},
                                 {"schedule", to_string(config_.schedule)},
                                 {"max_epochs", config_.max_epochs},
                                 {"batch_size", config_.batch_size},
                                 {"seed", config_.seed},
                                 {"threshold", config_.threshold},
                                 {"early_stop_patience", config_.early_stop_patience},
                                 {"vocab_budget", config_.vocab_budget}};
        write_text_file(dir / "config.json", config.dump(2) + "\n");
        write_text_file(dir / "pipeline_fingerprint.json", fingerprint_.to_json().dump(2) + "\n");

        std::string log_lines;
        for (const auto& entry : log_) log_lines += entry.to_json().dump() + "\n";
        write_text_file(dir / "training_log.jsonl", log_lines);
    }

    static TransformerModel load(const std::filesystem::path& dir) {
        TransformerModel model;
        nlohmann::json config;
        try {
            config = nlohmann::json::parse(read_text_file(dir / "config.json"));
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("config.json: ") + e.what());
        }
        if (config.at("model").get<std::string>() != "transformer")
            throw validation_error("artifact at " + dir.string() + " is not a transformer model");
        model.config_.peak_lr = config.at("peak_lr").get<double>();
        model.config_.warmup = config.at("warmup").get<double>();
        model.config_.schedule = schedule_from_string(config.at("schedule").get<std::string>());
        model.config_.max_epochs = config.at("max_epochs").get<std::size_t>();
        model.config_.batch_size = config.at("batch_size").get<std::size_t>();
        model.config_.seed = config.at("seed").get<std::uint64_t>();
        model.config_.threshold = config.at("threshold").get<double>();
        model.config_.early_stop_patience = config.at("early_stop_patience").get<std::size_t>();
        model.config_.vocab_budget = config.at("vocab_budget").get<std::size_t>();
        model.encoder_id_ = config.at("encoder_id").get<std::string>();

        try {
            model.encoder_ =
                Encoder::from_json(nlohmann::json::parse(read_text_file(dir / "encoder.json")));
            model.tokenizer_ = WordPieceTokenizer::load(dir / "vocab.txt");
            model.fingerprint_ = PipelineFingerprint::from_json(
                nlohmann::json::parse(read_text_file(dir / "pipeline_fingerprint.json")));

            nlohmann::json head = nlohmann::json::parse(read_text_file(dir / "head.json"));
            const auto& weight = head.at("weight");
            const auto& bias = head.at("bias");
            if (weight.size() != kNumDimensions || bias.size() != kNumDimensions)
                throw parse_error("head.json: expected one row and bias per dimension");
            std::size_t hidden = model.encoder_.spec().hidden;
            model.head_w_.init_zero(kNumDimensions, hidden, "head_w", true);
            model.head_b_.init_zero(kNumDimensions, 1, "head_b", false);
            for (std::size_t r = 0; r < kNumDimensions; ++r) {
                if (weight[r].size() != hidden)
                    throw parse_error("head.json: weight row width does not match encoder");
                for (std::size_t c = 0; c < hidden; ++c)
                    model.head_w_.v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                        weight[r][c].get<double>();
                model.head_b_.v(static_cast<Eigen::Index>(r), 0) = bias[r].get<double>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("transformer artifact: ") + e.what());
        }

        if (model.tokenizer_.vocab_size() != model.encoder_.spec().vocab)
            throw validation_error("transformer artifact: tokenizer/encoder vocab mismatch");

        std::filesystem::path log_path = dir / "training_log.jsonl";
        if (std::filesystem::exists(log_path)) {
            std::string content = read_text_file(log_path);
            std::size_t start = 0;
            while (start < content.size()) {
                std::size_t end = content.find('\n', start);
                if (end == std::string::npos) end = content.size();
                std::string line = content.substr(start, end - start);
                if (!line.empty())
                    model.log_.push_back(TrainingLogEntry::from_json(nlohmann::json::parse(line)));
                start = end + 1;
            }
        }
        return model;
    }

private:
    void init_head(std::uint64_t seed) {
        std::size_t hidden = encoder_.spec().hidden;
        head_w_.init_zero(kNumDimensions, hidden, "head_w", true);
        head_b_.init_zero(kNumDimensions, 1, "head_b", false);
        Rng rng(seed);
        for (Eigen::Index r = 0; r < head_w_.v.rows(); ++r)
            for (Eigen::Index c = 0; c < head_w_.v.cols(); ++c)
                head_w_.v(r, c) = normal(rng, 0.0, 0.02);
    }

    Eigen::VectorXd logits_for_ids(const std::vector<int>& ids) {
        Eigen::VectorXd pooled = encoder_.forward(ids);
        return head_w_.v * pooled + head_b_.v.col(0);
    }

    std::array<double, kNumDimensions> probs_for_ids(const std::vector<int>& ids) {
        Eigen::VectorXd z = logits_for_ids(ids);
        std::array<double, kNumDimensions> probs{};
        for (std::size_t d = 0; d < kNumDimensions; ++d)
            probs[d] = detail::stable_sigmoid(z(static_cast<Eigen::Index>(d)));
        return probs;
    }

    // Forward + backward for one example; gradients are scaled by `weight`
    // (1/batch) so the batch gradient is the gradient of the mean loss.
    // Returns the example's unweighted per-label-averaged loss.
    double accumulate_example(const std::vector<int>& ids, const LabelVector& labels,
                              double weight) {
        detail::ForwardCache cache;
        Eigen::VectorXd pooled = encoder_.forward(ids, &cache);
        Eigen::VectorXd z = head_w_.v * pooled + head_b_.v.col(0);

        double loss = 0.0;
        Eigen::VectorXd dz(static_cast<Eigen::Index>(kNumDimensions));
        for (std::size_t d = 0; d < kNumDimensions; ++d) {
            double y = static_cast<double>(labels.bits[d]);
            auto idx = static_cast<Eigen::Index>(d);
            loss += detail::bce_logits(z(idx), y);
            dz(idx) = (detail::stable_sigmoid(z(idx)) - y) * weight /
                      static_cast<double>(kNumDimensions);
        }
        head_w_.g += dz * pooled.transpose();
        head_b_.g.col(0) += dz;
        encoder_.backward(cache, head_w_.v.transpose() * dz);
        return loss / static_cast<double>(kNumDimensions);
    }

    WordPieceTokenizer tokenizer_;
    Encoder encoder_;
    Param head_w_, head_b_;
    TrainConfig config_;
    PipelineFingerprint fingerprint_;
    std::string encoder_id_;
    std::vector<TrainingLogEntry> log_;
};

} // namespace teamdims
