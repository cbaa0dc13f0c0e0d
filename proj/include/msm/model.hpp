#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "msm/masking.hpp"
#include "msm/rng.hpp"
#include "msm/waveform.hpp"

namespace msm {

struct ModelConfig {
    int d_model = 512;
    int n_blocks = 6;
    int n_heads = 8;
    int d_ff = 0;  // 0 means 4 * d_model
    int vocab_size = 272;
    int max_len = 1024;
    int proj_kernel = 1;  // width of the input projection window, odd
    bool share_block_weights = false;

    int ff_width() const { return d_ff > 0 ? d_ff : 4 * d_model; }
    int head_dim() const { return d_model / n_heads; }
    void validate() const;
};

struct LayerNormParams {
    Eigen::VectorXd gamma;
    Eigen::VectorXd beta;
};

struct AttentionParams {
    Eigen::MatrixXd wq, wk, wv, wo;  // d x d each, heads as column blocks
    Eigen::VectorXd bq, bk, bv, bo;
};

struct BlockParams {
    LayerNormParams ln1;
    AttentionParams attn;
    LayerNormParams ln2;
    Eigen::MatrixXd w1;  // d x d_ff
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;  // d_ff x d
    Eigen::VectorXd b2;
};

// All learnable tensors. Blocks are stored once when share_block_weights is
// set and reused at every depth.
struct ModelParams {
    ModelConfig config;
    Eigen::MatrixXd w_in;  // (2 * proj_kernel) x d_model
    Eigen::VectorXd b_in;
    std::vector<BlockParams> blocks;
    LayerNormParams ln_final;
    Eigen::MatrixXd w_cls;  // d_model x vocab_size
    Eigen::VectorXd b_cls;

    int stored_blocks() const { return static_cast<int>(blocks.size()); }
    const BlockParams& block_at_depth(int layer) const {
        return blocks[config.share_block_weights ? 0 : layer];
    }
    BlockParams& block_at_depth(int layer) {
        return blocks[config.share_block_weights ? 0 : layer];
    }
    std::size_t parameter_count() const;
};

// Flat view of one parameter tensor; the enumeration order is fixed, which
// makes the optimizer, checkpoints and finite-difference sweeps line up.
struct TensorView {
    std::string name;
    double* data;
    Eigen::Index rows;
    Eigen::Index cols;
    Eigen::Index size() const { return rows * cols; }
};
std::vector<TensorView> tensor_views(ModelParams& params);

// Zero tensors with the shapes implied by config.
ModelParams make_zero_params(const ModelConfig& config);

// Scaled-uniform init, scale 1/sqrt(fan_in); biases zero, layernorm identity.
ModelParams init_params(const ModelConfig& config, RandomStream& rng);

// Fixed sinusoidal encoding: PE[pos, 2i] = sin(pos / 10000^(2i/d)),
// PE[pos, 2i+1] = cos(pos / 10000^(2i/d)).
Eigen::MatrixXd positional_encoding(int n, int d);

struct LayerTrace {
    Eigen::MatrixXd ln1_xhat, ln1_out;
    Eigen::VectorXd ln1_invstd;
    Eigen::MatrixXd q, k, v;
    std::vector<Eigen::MatrixXd> attn_probs;  // per head, n x n
    Eigen::MatrixXd attn_concat;
    Eigen::MatrixXd ln2_xhat, ln2_out;
    Eigen::VectorXd ln2_invstd;
    Eigen::MatrixXd ff_pre, ff_act;
};

// Activations retained for the backward pass plus the classifier output, one
// logits row per masked symbol in spec order.
struct ForwardTrace {
    Eigen::MatrixXd input_cols;  // n x (2 * proj_kernel)
    std::vector<LayerTrace> layers;
    Eigen::MatrixXd lnf_xhat;
    Eigen::VectorXd lnf_invstd;
    Eigen::MatrixXd pooled;  // n_masked x d
    Eigen::MatrixXd logits;  // n_masked x vocab
    std::vector<int> masked_symbols;
    int sps = 0;
};

// Full pipeline: input projection, positional encoding, encoder blocks,
// mean-pooling over each masked symbol's sample span, linear classifier.
ForwardTrace forward(const ModelParams& params, const Waveform& masked_wave,
                     const MaskSpec& spec);

// Inference-only variant that keeps no activations.
Eigen::MatrixXd forward_logits(const ModelParams& params, const Waveform& masked_wave,
                               const MaskSpec& spec);

struct MaskedLoss {
    double weighted_ce = 0.0;  // sum of w(target) * CE over rows
    double weight_sum = 0.0;
    long correct = 0;

    double loss() const { return weighted_ce / weight_sum; }
};

// Inverse-frequency-weighted cross-entropy over the masked rows. When
// dlogits is non-null it receives the gradient of weighted_ce (the
// un-normalized numerator); dividing by the accumulated weight_sum afterwards
// yields the gradient of the normalized loss, which lets batches with a
// shared normalizer be assembled example by example.
MaskedLoss masked_cross_entropy(const Eigen::MatrixXd& logits,
                                const std::vector<std::uint16_t>& targets,
                                const std::vector<double>& class_weights,
                                Eigen::MatrixXd* dlogits);

// Accumulates gradients of weighted_ce into grads (shapes from make_zero_params).
void backward(const ModelParams& params, const ForwardTrace& trace,
              const Eigen::MatrixXd& dlogits, ModelParams& grads);

}  // namespace msm
