#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "teamdims/encoder.hpp"
#include "teamdims/error.hpp"

namespace teamdims {

struct AdamWConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
};

// Adam with decoupled weight decay. Decay is applied only to tensors flagged
// `decay` (weight matrices and embeddings), never to biases or LayerNorm
// parameters, and is not part of the adaptive moment estimates.
class AdamW {
public:
    explicit AdamW(const std::vector<Param*>& params, AdamWConfig config = {})
        : config_(config) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const Param* p : params) {
            m_.push_back(Eigen::MatrixXd::Zero(p->v.rows(), p->v.cols()));
            v_.push_back(Eigen::MatrixXd::Zero(p->v.rows(), p->v.cols()));
        }
    }

    // One update from the gradients currently accumulated in each Param.
    void step(const std::vector<Param*>& params, double lr) {
        if (params.size() != m_.size())
            throw validation_error("adamw: parameter list changed size");
        ++t_;
        double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
        double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            Param& p = *params[i];
            m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * p.g;
            v_[i] = (config_.beta2 * v_[i].array() + (1.0 - config_.beta2) * p.g.array().square())
                        .matrix();
            Eigen::ArrayXXd mhat = m_[i].array() / bc1;
            Eigen::ArrayXXd vhat = v_[i].array() / bc2;
            Eigen::ArrayXXd update = mhat / (vhat.sqrt() + config_.eps);
            if (p.decay) update += config_.weight_decay * p.v.array();
            p.v -= (lr * update).matrix();
        }
    }

    std::size_t steps_taken() const { return t_; }
    const AdamWConfig& config() const { return config_; }

private:
    AdamWConfig config_;
    std::size_t t_ = 0;
    std::vector<Eigen::MatrixXd> m_, v_;
};

} // namespace teamdims
