#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "teamdims/error.hpp"
#include "teamdims/rng.hpp"

namespace teamdims {

struct EncoderSpec {
    std::size_t hidden = 64;
    std::size_t layers = 2;
    std::size_t heads = 4;
    std::size_t ff = 256;
    std::size_t vocab = 0; // filled from the tokenizer
    std::size_t max_seq_len = 200;
    std::size_t type_vocab = 2;
    double ln_eps = 1e-12;

    void validate() const {
        if (hidden == 0 || layers == 0 || heads == 0 || ff == 0)
            throw validation_error("encoder spec: zero-sized dimension");
        if (hidden % heads != 0)
            throw validation_error("encoder spec: hidden must be divisible by heads");
        if (vocab < 5) throw validation_error("encoder spec: vocab must cover the special ids");
        if (max_seq_len < 2) throw validation_error("encoder spec: max_seq_len must be >= 2");
    }

    nlohmann::json to_json() const {
        return {{"hidden", hidden}, {"layers", layers},           {"heads", heads},
                {"ff", ff},         {"vocab", vocab},             {"max_seq_len", max_seq_len},
                {"type_vocab", type_vocab}, {"ln_eps", ln_eps}};
    }

    static EncoderSpec from_json(const nlohmann::json& obj) {
        EncoderSpec spec;
        spec.hidden = obj.at("hidden").get<std::size_t>();
        spec.layers = obj.at("layers").get<std::size_t>();
        spec.heads = obj.at("heads").get<std::size_t>();
        spec.ff = obj.at("ff").get<std::size_t>();
        spec.vocab = obj.at("vocab").get<std::size_t>();
        spec.max_seq_len = obj.at("max_seq_len").get<std::size_t>();
        spec.type_vocab = obj.at("type_vocab").get<std::size_t>();
        spec.ln_eps = obj.at("ln_eps").get<double>();
        return spec;
    }
};

// Built-in architectures usable without any downloaded checkpoint. Weights
// are randomly initialized from the training seed.
inline std::optional<EncoderSpec> preset_encoder_spec(const std::string& id) {
    if (id == "mini-cased") {
        EncoderSpec spec;
        spec.hidden = 64;
        spec.layers = 2;
        spec.heads = 4;
        spec.ff = 256;
        return spec;
    }
    if (id == "tiny-cased") {
        EncoderSpec spec;
        spec.hidden = 32;
        spec.layers = 2;
        spec.heads = 2;
        spec.ff = 128;
        return spec;
    }
    return std::nullopt;
}

// One trainable tensor: value, accumulated gradient, and whether decoupled
// weight decay applies (it does for weight matrices and embeddings, not for
// biases or LayerNorm parameters).
struct Param {
    std::string name;
    Eigen::MatrixXd v;
    Eigen::MatrixXd g;
    bool decay = true;

    void init_zero(std::size_t rows, std::size_t cols, std::string n, bool d) {
        name = std::move(n);
        decay = d;
        v = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        g = v;
    }
};

namespace detail {

struct LnCache {
    Eigen::MatrixXd xhat;
    Eigen::VectorXd inv;
};

struct LayerCache {
    Eigen::MatrixXd x, q, k, v, c, y1, hff, gelu, y2;
    std::vector<Eigen::MatrixXd> probs; // per-head attention, T x T
    LnCache ln1, ln2;
};

struct ForwardCache {
    std::vector<int> ids;
    LnCache ln_emb;
    Eigen::MatrixXd embedded; // after embedding LayerNorm
    std::vector<LayerCache> layers;
    Eigen::VectorXd pooled_pre; // pooler pre-activation
    Eigen::VectorXd pooled;     // tanh output
};

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline double gelu_grad(double x) {
    double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    double cdf = 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
    return cdf + x * phi;
}

} // namespace detail

// Transformer encoder with learned word/position/type embeddings, post-LN
// multi-head self-attention blocks, GELU feed-forward, and a tanh pooler
// over the first token. Sequences are processed one at a time (no padding),
// so results cannot depend on how a corpus is batched. All math is double
// precision; forward/backward are hand-written against Eigen.
class Encoder {
public:
    Encoder() = default;

    Encoder(EncoderSpec spec, std::uint64_t init_seed) : spec_(spec) {
        spec_.validate();
        allocate();
        Rng rng(init_seed);
        // fill order is the params() order, row-major within each tensor
        for (Param* p : params()) {
            if (p->name.find("ln") != std::string::npos && p->name.ends_with("gamma")) {
                p->v.setOnes();
            } else if (!p->decay) {
                p->v.setZero(); // biases, LN betas
            } else {
                for (Eigen::Index r = 0; r < p->v.rows(); ++r)
                    for (Eigen::Index c = 0; c < p->v.cols(); ++c)
                        p->v(r, c) = normal(rng, 0.0, 0.02);
            }
        }
    }

    const EncoderSpec& spec() const { return spec_; }

    std::vector<Param*> params() {
        std::vector<Param*> out = {&word_emb_, &pos_emb_, &type_emb_, &emb_ln_g_, &emb_ln_b_};
        for (auto& layer : layers_) {
            for (Param* p : {&layer.wq, &layer.bq, &layer.wk, &layer.bk, &layer.wv, &layer.bv,
                             &layer.wo, &layer.bo, &layer.ln1_g, &layer.ln1_b, &layer.w1,
                             &layer.b1, &layer.w2, &layer.b2, &layer.ln2_g, &layer.ln2_b})
                out.push_back(p);
        }
        out.push_back(&pooler_w_);
        out.push_back(&pooler_b_);
        return out;
    }

    void zero_grads() {
        for (Param* p : params()) p->g.setZero();
    }

    // Pooled representation of the sequence; fills `cache` when given so a
    // matching backward() call can run.
    Eigen::VectorXd forward(const std::vector<int>& ids, detail::ForwardCache* cache = nullptr) {
        if (ids.empty()) throw validation_error("encoder: empty id sequence");
        if (ids.size() > spec_.max_seq_len)
            throw validation_error("encoder: sequence longer than max_seq_len");
        const auto T = static_cast<Eigen::Index>(ids.size());
        const auto H = static_cast<Eigen::Index>(spec_.hidden);

        Eigen::MatrixXd x(T, H);
        for (Eigen::Index t = 0; t < T; ++t) {
            int id = ids[static_cast<std::size_t>(t)];
            if (id < 0 || static_cast<std::size_t>(id) >= spec_.vocab)
                throw validation_error("encoder: token id out of range");
            x.row(t) = word_emb_.v.row(id) + pos_emb_.v.row(t) + type_emb_.v.row(0);
        }
        detail::LnCache emb_ln;
        x = layer_norm(x, emb_ln_g_.v, emb_ln_b_.v, emb_ln);

        if (cache) {
            cache->ids = ids;
            cache->ln_emb = emb_ln;
            cache->embedded = x;
            cache->layers.assign(layers_.size(), {});
        }

        for (std::size_t l = 0; l < layers_.size(); ++l)
            x = layer_forward(layers_[l], x, cache ? &cache->layers[l] : nullptr);

        Eigen::VectorXd pre = pooler_w_.v * x.row(0).transpose() + pooler_b_.v.col(0);
        Eigen::VectorXd pooled = pre.array().tanh().matrix();
        if (cache) {
            cache->pooled_pre = pre;
            cache->pooled = pooled;
        }
        return pooled;
    }

    // Accumulates parameter gradients for d(loss)/d(pooled).
    void backward(const detail::ForwardCache& cache, const Eigen::VectorXd& d_pooled) {
        const auto H = static_cast<Eigen::Index>(spec_.hidden);
        const auto T = static_cast<Eigen::Index>(cache.ids.size());

        // pooler: pooled = tanh(Wp x0 + bp)
        Eigen::VectorXd d_pre =
            (d_pooled.array() * (1.0 - cache.pooled.array().square())).matrix();
        const Eigen::MatrixXd& last =
            layers_.empty() ? cache.embedded : cache.layers.back().y2;
        pooler_w_.g += d_pre * last.row(0);
        pooler_b_.g.col(0) += d_pre;

        Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(T, H);
        dx.row(0) = (pooler_w_.v.transpose() * d_pre).transpose();

        for (std::size_t l = layers_.size(); l-- > 0;)
            dx = layer_backward(layers_[l], cache.layers[l], dx);

        // embedding LayerNorm, then scatter into embedding tables
        Eigen::MatrixXd dsum = layer_norm_backward(dx, cache.ln_emb, emb_ln_g_, emb_ln_b_);
        for (Eigen::Index t = 0; t < T; ++t) {
            word_emb_.g.row(cache.ids[static_cast<std::size_t>(t)]) += dsum.row(t);
            pos_emb_.g.row(t) += dsum.row(t);
            type_emb_.g.row(0) += dsum.row(t);
        }
    }

    nlohmann::json to_json() {
        nlohmann::json tensors = nlohmann::json::object();
        for (Param* p : params()) {
            std::vector<double> data;
            data.reserve(static_cast<std::size_t>(p->v.size()));
            for (Eigen::Index r = 0; r < p->v.rows(); ++r)
                for (Eigen::Index c = 0; c < p->v.cols(); ++c) data.push_back(p->v(r, c));
            tensors[p->name] = {{"rows", p->v.rows()}, {"cols", p->v.cols()}, {"data", data}};
        }
        return {{"spec", spec_.to_json()}, {"tensors", tensors}};
    }

    static Encoder from_json(const nlohmann::json& obj) {
        Encoder enc;
        enc.spec_ = EncoderSpec::from_json(obj.at("spec"));
        enc.spec_.validate();
        enc.allocate();
        const auto& tensors = obj.at("tensors");
        for (Param* p : enc.params()) {
            if (!tensors.contains(p->name))
                throw parse_error("encoder checkpoint: missing tensor " + p->name);
            const auto& t = tensors.at(p->name);
            auto rows = t.at("rows").get<Eigen::Index>();
            auto cols = t.at("cols").get<Eigen::Index>();
            if (rows != p->v.rows() || cols != p->v.cols())
                throw parse_error("encoder checkpoint: tensor " + p->name + " has shape " +
                                  std::to_string(rows) + "x" + std::to_string(cols) +
                                  ", expected " + std::to_string(p->v.rows()) + "x" +
                                  std::to_string(p->v.cols()));
            const auto& data = t.at("data");
            if (static_cast<Eigen::Index>(data.size()) != rows * cols)
                throw parse_error("encoder checkpoint: tensor " + p->name + " data size mismatch");
            std::size_t i = 0;
            for (Eigen::Index r = 0; r < rows; ++r)
                for (Eigen::Index c = 0; c < cols; ++c) p->v(r, c) = data[i++].get<double>();
        }
        return enc;
    }

private:
    struct Layer {
        Param wq, bq, wk, bk, wv, bv, wo, bo;
        Param ln1_g, ln1_b;
        Param w1, b1, w2, b2;
        Param ln2_g, ln2_b;
    };

    void allocate() {
        std::size_t h = spec_.hidden, f = spec_.ff;
        word_emb_.init_zero(spec_.vocab, h, "word_emb", true);
        pos_emb_.init_zero(spec_.max_seq_len, h, "pos_emb", true);
        type_emb_.init_zero(spec_.type_vocab, h, "type_emb", true);
        emb_ln_g_.init_zero(1, h, "emb_ln_gamma", false);
        emb_ln_b_.init_zero(1, h, "emb_ln_beta", false);
        layers_.resize(spec_.layers);
        for (std::size_t l = 0; l < spec_.layers; ++l) {
            std::string prefix = "layer" + std::to_string(l) + ".";
            Layer& layer = layers_[l];
            layer.wq.init_zero(h, h, prefix + "wq", true);
            layer.bq.init_zero(1, h, prefix + "bq", false);
            layer.wk.init_zero(h, h, prefix + "wk", true);
            layer.bk.init_zero(1, h, prefix + "bk", false);
            layer.wv.init_zero(h, h, prefix + "wv", true);
            layer.bv.init_zero(1, h, prefix + "bv", false);
            layer.wo.init_zero(h, h, prefix + "wo", true);
            layer.bo.init_zero(1, h, prefix + "bo", false);
            layer.ln1_g.init_zero(1, h, prefix + "ln1_gamma", false);
            layer.ln1_b.init_zero(1, h, prefix + "ln1_beta", false);
            layer.w1.init_zero(h, f, prefix + "w1", true);
            layer.b1.init_zero(1, f, prefix + "b1", false);
            layer.w2.init_zero(f, h, prefix + "w2", true);
            layer.b2.init_zero(1, h, prefix + "b2", false);
            layer.ln2_g.init_zero(1, h, prefix + "ln2_gamma", false);
            layer.ln2_b.init_zero(1, h, prefix + "ln2_beta", false);
        }
        pooler_w_.init_zero(spec_.hidden, spec_.hidden, "pooler_w", true);
        pooler_b_.init_zero(spec_.hidden, 1, "pooler_b", false);
    }

    Eigen::MatrixXd layer_norm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& gamma,
                               const Eigen::MatrixXd& beta, detail::LnCache& cache) const {
        const Eigen::Index T = x.rows(), H = x.cols();
        cache.xhat.resize(T, H);
        cache.inv.resize(T);
        Eigen::MatrixXd out(T, H);
        for (Eigen::Index t = 0; t < T; ++t) {
            double mu = x.row(t).mean();
            double var = (x.row(t).array() - mu).square().mean();
            double inv = 1.0 / std::sqrt(var + spec_.ln_eps);
            cache.inv(t) = inv;
            cache.xhat.row(t) = ((x.row(t).array() - mu) * inv).matrix();
            out.row(t) =
                (cache.xhat.row(t).array() * gamma.row(0).array() + beta.row(0).array()).matrix();
        }
        return out;
    }

    Eigen::MatrixXd layer_norm_backward(const Eigen::MatrixXd& dy, const detail::LnCache& cache,
                                        Param& gamma, Param& beta) const {
        const Eigen::Index T = dy.rows(), H = dy.cols();
        Eigen::MatrixXd dx(T, H);
        for (Eigen::Index t = 0; t < T; ++t) {
            gamma.g.row(0).array() += dy.row(t).array() * cache.xhat.row(t).array();
            beta.g.row(0) += dy.row(t);
            Eigen::ArrayXXd dxhat = dy.row(t).array() * gamma.v.row(0).array(); // 1 x H
            double m1 = dxhat.mean();
            double m2 = (dxhat * cache.xhat.row(t).array()).mean();
            dx.row(t) =
                (cache.inv(t) * (dxhat - m1 - cache.xhat.row(t).array() * m2)).matrix();
        }
        return dx;
    }

    Eigen::MatrixXd layer_forward(Layer& layer, const Eigen::MatrixXd& x,
                                  detail::LayerCache* cache) const {
        const Eigen::Index T = x.rows(), H = x.cols();
        const auto A = static_cast<Eigen::Index>(spec_.heads);
        const Eigen::Index dh = H / A;
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        Eigen::MatrixXd q = (x * layer.wq.v).rowwise() + layer.bq.v.row(0);
        Eigen::MatrixXd k = (x * layer.wk.v).rowwise() + layer.bk.v.row(0);
        Eigen::MatrixXd v = (x * layer.wv.v).rowwise() + layer.bv.v.row(0);

        Eigen::MatrixXd c(T, H);
        std::vector<Eigen::MatrixXd> probs(static_cast<std::size_t>(A));
        for (Eigen::Index h = 0; h < A; ++h) {
            Eigen::MatrixXd scores =
                q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose() * scale;
            Eigen::MatrixXd p(T, T);
            for (Eigen::Index t = 0; t < T; ++t) {
                Eigen::ArrayXXd row = scores.row(t).array(); // 1 x T
                double mx = row.maxCoeff();
                Eigen::ArrayXXd e = (row - mx).exp();
                p.row(t) = (e / e.sum()).matrix();
            }
            c.middleCols(h * dh, dh) = p * v.middleCols(h * dh, dh);
            probs[static_cast<std::size_t>(h)] = std::move(p);
        }

        Eigen::MatrixXd attn = (c * layer.wo.v).rowwise() + layer.bo.v.row(0);
        detail::LnCache ln1, ln2;
        Eigen::MatrixXd y1 = layer_norm(x + attn, layer.ln1_g.v, layer.ln1_b.v, ln1);

        Eigen::MatrixXd hff = (y1 * layer.w1.v).rowwise() + layer.b1.v.row(0);
        Eigen::MatrixXd g = hff.unaryExpr([](double z) { return detail::gelu(z); });
        Eigen::MatrixXd ffn = (g * layer.w2.v).rowwise() + layer.b2.v.row(0);
        Eigen::MatrixXd y2 = layer_norm(y1 + ffn, layer.ln2_g.v, layer.ln2_b.v, ln2);

        if (cache) {
            cache->x = x;
            cache->q = std::move(q);
            cache->k = std::move(k);
            cache->v = std::move(v);
            cache->c = std::move(c);
            cache->probs = std::move(probs);
            cache->ln1 = std::move(ln1);
            cache->ln2 = std::move(ln2);
            cache->y1 = std::move(y1);
            cache->hff = std::move(hff);
            cache->gelu = std::move(g);
            cache->y2 = y2;
            return y2;
        }
        return y2;
    }

    Eigen::MatrixXd layer_backward(Layer& layer, const detail::LayerCache& cache,
                                   const Eigen::MatrixXd& dy2) {
        const Eigen::Index T = cache.x.rows(), H = cache.x.cols();
        const auto A = static_cast<Eigen::Index>(spec_.heads);
        const Eigen::Index dh = H / A;
        const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

        // y2 = LN2(y1 + ffn)
        Eigen::MatrixXd dr2 = layer_norm_backward(dy2, cache.ln2, layer.ln2_g, layer.ln2_b);
        Eigen::MatrixXd dy1 = dr2;

        // ffn = gelu(y1 w1 + b1) w2 + b2
        Eigen::MatrixXd dg = dr2 * layer.w2.v.transpose();
        layer.w2.g += cache.gelu.transpose() * dr2;
        layer.b2.g.row(0) += dr2.colwise().sum();
        Eigen::MatrixXd dhff =
            (dg.array() *
             cache.hff.unaryExpr([](double z) { return detail::gelu_grad(z); }).array())
                .matrix();
        dy1 += dhff * layer.w1.v.transpose();
        layer.w1.g += cache.y1.transpose() * dhff;
        layer.b1.g.row(0) += dhff.colwise().sum();

        // y1 = LN1(x + attn)
        Eigen::MatrixXd dr1 = layer_norm_backward(dy1, cache.ln1, layer.ln1_g, layer.ln1_b);
        Eigen::MatrixXd dx = dr1;

        // attn = c wo + bo
        Eigen::MatrixXd dc = dr1 * layer.wo.v.transpose();
        layer.wo.g += cache.c.transpose() * dr1;
        layer.bo.g.row(0) += dr1.colwise().sum();

        Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(T, H);
        Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(T, H);
        Eigen::MatrixXd dv = Eigen::MatrixXd::Zero(T, H);
        for (Eigen::Index h = 0; h < A; ++h) {
            const Eigen::MatrixXd& p = cache.probs[static_cast<std::size_t>(h)];
            Eigen::MatrixXd dch = dc.middleCols(h * dh, dh);
            Eigen::MatrixXd dp = dch * cache.v.middleCols(h * dh, dh).transpose();
            dv.middleCols(h * dh, dh) = p.transpose() * dch;

            Eigen::MatrixXd ds(T, T);
            for (Eigen::Index t = 0; t < T; ++t) {
                double dot = dp.row(t).dot(p.row(t));
                ds.row(t) = (p.row(t).array() * (dp.row(t).array() - dot)).matrix();
            }
            dq.middleCols(h * dh, dh) = ds * cache.k.middleCols(h * dh, dh) * scale;
            dk.middleCols(h * dh, dh) = ds.transpose() * cache.q.middleCols(h * dh, dh) * scale;
        }

        dx += dq * layer.wq.v.transpose() + dk * layer.wk.v.transpose() +
              dv * layer.wv.v.transpose();
        layer.wq.g += cache.x.transpose() * dq;
        layer.bq.g.row(0) += dq.colwise().sum();
        layer.wk.g += cache.x.transpose() * dk;
        layer.bk.g.row(0) += dk.colwise().sum();
        layer.wv.g += cache.x.transpose() * dv;
        layer.bv.g.row(0) += dv.colwise().sum();
        return dx;
    }

    EncoderSpec spec_;
    Param word_emb_, pos_emb_, type_emb_, emb_ln_g_, emb_ln_b_;
    std::vector<Layer> layers_;
    Param pooler_w_, pooler_b_;
};

} // namespace teamdims
