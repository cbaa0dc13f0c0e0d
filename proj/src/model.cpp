#include "msm/model.hpp"

#include <cmath>
#include <stdexcept>

namespace msm {

void ModelConfig::validate() const {
    if (d_model < 2 || d_model % 2 != 0)
        throw std::invalid_argument("model: d_model must be even and >= 2");
    if (n_blocks < 1) throw std::invalid_argument("model: n_blocks must be >= 1");
    if (n_heads < 1 || d_model % n_heads != 0)
        throw std::invalid_argument("model: d_model must be divisible by n_heads");
    if (vocab_size < 2) throw std::invalid_argument("model: vocab_size must be >= 2");
    if (max_len < 1) throw std::invalid_argument("model: max_len must be >= 1");
    if (proj_kernel < 1 || proj_kernel % 2 == 0)
        throw std::invalid_argument("model: proj_kernel must be odd and >= 1");
    if (d_ff < 0) throw std::invalid_argument("model: d_ff must be >= 0");
}

namespace {

LayerNormParams make_layernorm(int d) {
    LayerNormParams ln;
    ln.gamma = Eigen::VectorXd::Zero(d);
    ln.beta = Eigen::VectorXd::Zero(d);
    return ln;
}

void fill_uniform(Eigen::MatrixXd& m, double scale, RandomStream& rng) {
    double* p = m.data();
    for (Eigen::Index i = 0; i < m.size(); ++i)
        p[i] = (2.0 * rng.uniform() - 1.0) * scale;
}

}  // namespace

ModelParams make_zero_params(const ModelConfig& config) {
    config.validate();
    const int d = config.d_model;
    const int dff = config.ff_width();

    ModelParams p;
    p.config = config;
    p.w_in = Eigen::MatrixXd::Zero(2 * config.proj_kernel, d);
    p.b_in = Eigen::VectorXd::Zero(d);

    const int n_stored = config.share_block_weights ? 1 : config.n_blocks;
    p.blocks.resize(n_stored);
    for (BlockParams& b : p.blocks) {
        b.ln1 = make_layernorm(d);
        b.attn.wq = Eigen::MatrixXd::Zero(d, d);
        b.attn.wk = Eigen::MatrixXd::Zero(d, d);
        b.attn.wv = Eigen::MatrixXd::Zero(d, d);
        b.attn.wo = Eigen::MatrixXd::Zero(d, d);
        b.attn.bq = Eigen::VectorXd::Zero(d);
        b.attn.bk = Eigen::VectorXd::Zero(d);
        b.attn.bv = Eigen::VectorXd::Zero(d);
        b.attn.bo = Eigen::VectorXd::Zero(d);
        b.ln2 = make_layernorm(d);
        b.w1 = Eigen::MatrixXd::Zero(d, dff);
        b.b1 = Eigen::VectorXd::Zero(dff);
        b.w2 = Eigen::MatrixXd::Zero(dff, d);
        b.b2 = Eigen::VectorXd::Zero(d);
    }
    p.ln_final = make_layernorm(d);
    p.w_cls = Eigen::MatrixXd::Zero(d, config.vocab_size);
    p.b_cls = Eigen::VectorXd::Zero(config.vocab_size);
    return p;
}

ModelParams init_params(const ModelConfig& config, RandomStream& rng) {
    ModelParams p = make_zero_params(config);
    const double d = static_cast<double>(config.d_model);
    fill_uniform(p.w_in, 1.0 / std::sqrt(2.0 * config.proj_kernel), rng);
    for (BlockParams& b : p.blocks) {
        const double s = 1.0 / std::sqrt(d);
        b.ln1.gamma.setOnes();
        b.ln2.gamma.setOnes();
        fill_uniform(b.attn.wq, s, rng);
        fill_uniform(b.attn.wk, s, rng);
        fill_uniform(b.attn.wv, s, rng);
        fill_uniform(b.attn.wo, s, rng);
        fill_uniform(b.w1, s, rng);
        fill_uniform(b.w2, 1.0 / std::sqrt(static_cast<double>(config.ff_width())), rng);
    }
    p.ln_final.gamma.setOnes();
    fill_uniform(p.w_cls, 1.0 / std::sqrt(d), rng);
    return p;
}

std::size_t ModelParams::parameter_count() const {
    std::size_t n = static_cast<std::size_t>(w_in.size() + b_in.size());
    for (const BlockParams& b : blocks) {
        n += static_cast<std::size_t>(b.ln1.gamma.size() + b.ln1.beta.size());
        n += static_cast<std::size_t>(b.attn.wq.size() + b.attn.wk.size() + b.attn.wv.size() +
                                      b.attn.wo.size());
        n += static_cast<std::size_t>(b.attn.bq.size() + b.attn.bk.size() + b.attn.bv.size() +
                                      b.attn.bo.size());
        n += static_cast<std::size_t>(b.ln2.gamma.size() + b.ln2.beta.size());
        n += static_cast<std::size_t>(b.w1.size() + b.b1.size() + b.w2.size() + b.b2.size());
    }
    n += static_cast<std::size_t>(ln_final.gamma.size() + ln_final.beta.size());
    n += static_cast<std::size_t>(w_cls.size() + b_cls.size());
    return n;
}

std::vector<TensorView> tensor_views(ModelParams& p) {
    std::vector<TensorView> v;
    auto add_mat = [&v](const std::string& name, Eigen::MatrixXd& m) {
        v.push_back({name, m.data(), m.rows(), m.cols()});
    };
    auto add_vec = [&v](const std::string& name, Eigen::VectorXd& x) {
        v.push_back({name, x.data(), x.rows(), 1});
    };
    add_mat("w_in", p.w_in);
    add_vec("b_in", p.b_in);
    for (int i = 0; i < p.stored_blocks(); ++i) {
        BlockParams& b = p.blocks[i];
        const std::string pre = "block" + std::to_string(i) + ".";
        add_vec(pre + "ln1.gamma", b.ln1.gamma);
        add_vec(pre + "ln1.beta", b.ln1.beta);
        add_mat(pre + "attn.wq", b.attn.wq);
        add_vec(pre + "attn.bq", b.attn.bq);
        add_mat(pre + "attn.wk", b.attn.wk);
        add_vec(pre + "attn.bk", b.attn.bk);
        add_mat(pre + "attn.wv", b.attn.wv);
        add_vec(pre + "attn.bv", b.attn.bv);
        add_mat(pre + "attn.wo", b.attn.wo);
        add_vec(pre + "attn.bo", b.attn.bo);
        add_vec(pre + "ln2.gamma", b.ln2.gamma);
        add_vec(pre + "ln2.beta", b.ln2.beta);
        add_mat(pre + "w1", b.w1);
        add_vec(pre + "b1", b.b1);
        add_mat(pre + "w2", b.w2);
        add_vec(pre + "b2", b.b2);
    }
    add_vec("ln_final.gamma", p.ln_final.gamma);
    add_vec("ln_final.beta", p.ln_final.beta);
    add_mat("w_cls", p.w_cls);
    add_vec("b_cls", p.b_cls);
    return v;
}

Eigen::MatrixXd positional_encoding(int n, int d) {
    if (d % 2 != 0) throw std::invalid_argument("positional_encoding: d must be even");
    Eigen::MatrixXd pe(n, d);
    for (int i = 0; i < d / 2; ++i) {
        const double rate = std::pow(10000.0, -2.0 * static_cast<double>(i) / d);
        for (int pos = 0; pos < n; ++pos) {
            pe(pos, 2 * i) = std::sin(pos * rate);
            pe(pos, 2 * i + 1) = std::cos(pos * rate);
        }
    }
    return pe;
}

}  // namespace msm
