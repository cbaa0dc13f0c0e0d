#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msm/model.hpp"

namespace msm {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Row-wise layernorm. Writes the normalized rows (xhat) and 1/std so the
// backward pass does not have to revisit the input.
void layernorm_forward(const Eigen::MatrixXd& x, const LayerNormParams& ln,
                       Eigen::MatrixXd& xhat, Eigen::VectorXd& invstd, Eigen::MatrixXd& out) {
    const Eigen::VectorXd mu = x.rowwise().mean();
    Eigen::MatrixXd xc = x.colwise() - mu;
    const Eigen::VectorXd var = xc.array().square().rowwise().mean().matrix();
    invstd = (var.array() + kLnEps).rsqrt().matrix();
    xhat = (xc.array().colwise() * invstd.array()).matrix();
    out = (xhat.array().rowwise() * ln.gamma.transpose().array()).matrix();
    out.array().rowwise() += ln.beta.transpose().array();
}

// dX for y = gamma .* xhat + beta, accumulating parameter grads.
Eigen::MatrixXd layernorm_backward(const Eigen::MatrixXd& dy, const Eigen::MatrixXd& xhat,
                                   const Eigen::VectorXd& invstd, const LayerNormParams& ln,
                                   LayerNormParams& grads) {
    grads.gamma.noalias() += (dy.array() * xhat.array()).colwise().sum().matrix().transpose();
    grads.beta.noalias() += dy.colwise().sum().transpose();

    const Eigen::MatrixXd g = (dy.array().rowwise() * ln.gamma.transpose().array()).matrix();
    const Eigen::VectorXd m1 = g.rowwise().mean();
    const Eigen::VectorXd m2 = (g.array() * xhat.array()).rowwise().mean().matrix();
    Eigen::MatrixXd dx = g;
    dx.colwise() -= m1;
    dx.array() -= xhat.array().colwise() * m2.array();
    dx.array().colwise() *= invstd.array();
    return dx;
}

void softmax_rows(Eigen::MatrixXd& s) {
    const Eigen::VectorXd rowmax = s.rowwise().maxCoeff();
    s = (s.colwise() - rowmax).array().exp().matrix();
    const Eigen::VectorXd rowsum = s.rowwise().sum();
    s.array().colwise() /= rowsum.array();
}

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * 0.70710678118654752440)); }

double gelu_grad(double x) {
    return 0.5 * (1.0 + std::erf(x * 0.70710678118654752440)) +
           x * std::exp(-0.5 * x * x) / kSqrt2Pi;
}

// Positional encodings are pure functions of (n, d); memoize the last request
// since training touches the same shape every step.
const Eigen::MatrixXd& cached_positional_encoding(int n, int d) {
    thread_local int cached_n = -1, cached_d = -1;
    thread_local Eigen::MatrixXd cached;
    if (cached_n != n || cached_d != d) {
        cached = positional_encoding(n, d);
        cached_n = n;
        cached_d = d;
    }
    return cached;
}

Eigen::MatrixXd gather_input_columns(const Waveform& w, int kernel) {
    const int n = w.num_samples();
    const int half = (kernel - 1) / 2;
    Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(n, 2 * kernel);
    for (int j = 0; j < kernel; ++j) {
        const int off = j - half;
        const int lo = std::max(0, -off);
        const int hi = std::min(n, n - off);
        for (int pos = lo; pos < hi; ++pos) {
            x0(pos, 2 * j) = w.i_samples[pos + off];
            x0(pos, 2 * j + 1) = w.q_samples[pos + off];
        }
    }
    return x0;
}

void check_forward_inputs(const ModelParams& params, const Waveform& wave, const MaskSpec& spec) {
    const int n = wave.num_samples();
    if (n < 1) throw std::invalid_argument("forward: empty waveform");
    if (n > params.config.max_len)
        throw std::invalid_argument("forward: waveform longer than config.max_len");
    if (spec.empty()) throw std::invalid_argument("forward: empty mask spec, no targets");
    if (spec.sps != wave.sps)
        throw std::invalid_argument("forward: mask spec and waveform disagree on sps");
    if (spec.masked_symbols.back() >= wave.num_symbols())
        throw std::out_of_range("forward: masked symbol outside the waveform");
}

Eigen::MatrixXd pool_masked_spans(const Eigen::MatrixXd& x, const MaskSpec& spec) {
    Eigen::MatrixXd pooled(spec.count(), x.cols());
    const double inv = 1.0 / static_cast<double>(spec.sps);
    for (int r = 0; r < spec.count(); ++r) {
        const auto [lo, hi] = spec.span(r);
        pooled.row(r) = x.middleRows(lo, hi - lo).colwise().sum() * inv;
    }
    return pooled;
}

}  // namespace

ForwardTrace forward(const ModelParams& params, const Waveform& wave, const MaskSpec& spec) {
    check_forward_inputs(params, wave, spec);
    const ModelConfig& cfg = params.config;
    const int n = wave.num_samples();
    const int d = cfg.d_model;
    const int dk = cfg.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

    ForwardTrace t;
    t.masked_symbols = spec.masked_symbols;
    t.sps = spec.sps;
    t.input_cols = gather_input_columns(wave, cfg.proj_kernel);

    Eigen::MatrixXd h = t.input_cols * params.w_in;
    h.array().rowwise() += params.b_in.transpose().array();
    h += cached_positional_encoding(n, d);

    t.layers.resize(cfg.n_blocks);
    for (int l = 0; l < cfg.n_blocks; ++l) {
        const BlockParams& b = params.block_at_depth(l);
        LayerTrace& lt = t.layers[l];

        layernorm_forward(h, b.ln1, lt.ln1_xhat, lt.ln1_invstd, lt.ln1_out);
        lt.q.noalias() = lt.ln1_out * b.attn.wq;
        lt.q.array().rowwise() += b.attn.bq.transpose().array();
        lt.k.noalias() = lt.ln1_out * b.attn.wk;
        lt.k.array().rowwise() += b.attn.bk.transpose().array();
        lt.v.noalias() = lt.ln1_out * b.attn.wv;
        lt.v.array().rowwise() += b.attn.bv.transpose().array();

        lt.attn_probs.resize(cfg.n_heads);
        lt.attn_concat.resize(n, d);
        for (int hd = 0; hd < cfg.n_heads; ++hd) {
            Eigen::MatrixXd s = lt.q.middleCols(hd * dk, dk) *
                                lt.k.middleCols(hd * dk, dk).transpose() * scale;
            softmax_rows(s);
            lt.attn_concat.middleCols(hd * dk, dk).noalias() = s * lt.v.middleCols(hd * dk, dk);
            lt.attn_probs[hd] = std::move(s);
        }
        h.noalias() += lt.attn_concat * b.attn.wo;
        h.array().rowwise() += b.attn.bo.transpose().array();

        layernorm_forward(h, b.ln2, lt.ln2_xhat, lt.ln2_invstd, lt.ln2_out);
        lt.ff_pre.noalias() = lt.ln2_out * b.w1;
        lt.ff_pre.array().rowwise() += b.b1.transpose().array();
        lt.ff_act = lt.ff_pre.unaryExpr([](double x) { return gelu(x); });
        h.noalias() += lt.ff_act * b.w2;
        h.array().rowwise() += b.b2.transpose().array();
    }

    Eigen::MatrixXd xf;
    layernorm_forward(h, params.ln_final, t.lnf_xhat, t.lnf_invstd, xf);
    t.pooled = pool_masked_spans(xf, spec);
    t.logits.noalias() = t.pooled * params.w_cls;
    t.logits.array().rowwise() += params.b_cls.transpose().array();
    if (!t.logits.allFinite())
        throw std::runtime_error("forward: non-finite logits (diverged activations)");
    return t;
}

Eigen::MatrixXd forward_logits(const ModelParams& params, const Waveform& wave,
                               const MaskSpec& spec) {
    check_forward_inputs(params, wave, spec);
    const ModelConfig& cfg = params.config;
    const int n = wave.num_samples();
    const int d = cfg.d_model;
    const int dk = cfg.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

    Eigen::MatrixXd h = gather_input_columns(wave, cfg.proj_kernel) * params.w_in;
    h.array().rowwise() += params.b_in.transpose().array();
    h += cached_positional_encoding(n, d);

    Eigen::MatrixXd xhat, out, q, k, v, concat;
    Eigen::VectorXd invstd;
    for (int l = 0; l < cfg.n_blocks; ++l) {
        const BlockParams& b = params.block_at_depth(l);
        layernorm_forward(h, b.ln1, xhat, invstd, out);
        q.noalias() = out * b.attn.wq;
        q.array().rowwise() += b.attn.bq.transpose().array();
        k.noalias() = out * b.attn.wk;
        k.array().rowwise() += b.attn.bk.transpose().array();
        v.noalias() = out * b.attn.wv;
        v.array().rowwise() += b.attn.bv.transpose().array();
        concat.resize(n, d);
        for (int hd = 0; hd < cfg.n_heads; ++hd) {
            Eigen::MatrixXd s =
                q.middleCols(hd * dk, dk) * k.middleCols(hd * dk, dk).transpose() * scale;
            softmax_rows(s);
            concat.middleCols(hd * dk, dk).noalias() = s * v.middleCols(hd * dk, dk);
        }
        h.noalias() += concat * b.attn.wo;
        h.array().rowwise() += b.attn.bo.transpose().array();

        layernorm_forward(h, b.ln2, xhat, invstd, out);
        Eigen::MatrixXd z1 = out * b.w1;
        z1.array().rowwise() += b.b1.transpose().array();
        z1 = z1.unaryExpr([](double x) { return gelu(x); });
        h.noalias() += z1 * b.w2;
        h.array().rowwise() += b.b2.transpose().array();
    }
    layernorm_forward(h, params.ln_final, xhat, invstd, out);
    Eigen::MatrixXd logits = pool_masked_spans(out, spec) * params.w_cls;
    logits.array().rowwise() += params.b_cls.transpose().array();
    if (!logits.allFinite())
        throw std::runtime_error("forward: non-finite logits (diverged activations)");
    return logits;
}

MaskedLoss masked_cross_entropy(const Eigen::MatrixXd& logits,
                                const std::vector<std::uint16_t>& targets,
                                const std::vector<double>& class_weights,
                                Eigen::MatrixXd* dlogits) {
    if (static_cast<Eigen::Index>(targets.size()) != logits.rows())
        throw std::invalid_argument("masked_cross_entropy: one target per logits row required");
    if (static_cast<Eigen::Index>(class_weights.size()) != logits.cols())
        throw std::invalid_argument("masked_cross_entropy: one weight per class required");

    MaskedLoss acc;
    if (dlogits) dlogits->resize(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const std::uint16_t target = targets[static_cast<std::size_t>(r)];
        if (target >= logits.cols())
            throw std::out_of_range("masked_cross_entropy: target id outside vocabulary");
        const double w = class_weights[target];

        Eigen::VectorXd p = logits.row(r).transpose();
        const double rowmax = p.maxCoeff();
        p = (p.array() - rowmax).exp().matrix();
        const double z = p.sum();
        acc.weighted_ce += w * (std::log(z) - (logits(r, target) - rowmax));
        acc.weight_sum += w;

        Eigen::Index argmax;
        logits.row(r).maxCoeff(&argmax);
        if (argmax == target) ++acc.correct;

        if (dlogits) {
            p /= z;
            p(target) -= 1.0;
            dlogits->row(r) = (w * p).transpose();
        }
    }
    if (!(acc.weight_sum > 0.0))
        throw std::invalid_argument("masked_cross_entropy: all target weights are zero");
    return acc;
}

void backward(const ModelParams& params, const ForwardTrace& trace,
              const Eigen::MatrixXd& dlogits, ModelParams& grads) {
    const ModelConfig& cfg = params.config;
    const int dk = cfg.head_dim();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    const int n = static_cast<int>(trace.input_cols.rows());

    grads.w_cls.noalias() += trace.pooled.transpose() * dlogits;
    grads.b_cls.noalias() += dlogits.colwise().sum().transpose();

    Eigen::MatrixXd dpooled = dlogits * params.w_cls.transpose();
    Eigen::MatrixXd dxf = Eigen::MatrixXd::Zero(n, cfg.d_model);
    const double inv_sps = 1.0 / static_cast<double>(trace.sps);
    for (std::size_t r = 0; r < trace.masked_symbols.size(); ++r) {
        const int lo = trace.masked_symbols[r] * trace.sps;
        for (int pos = lo; pos < lo + trace.sps; ++pos)
            dxf.row(pos) += dpooled.row(static_cast<Eigen::Index>(r)) * inv_sps;
    }

    Eigen::MatrixXd dh =
        layernorm_backward(dxf, trace.lnf_xhat, trace.lnf_invstd, params.ln_final, grads.ln_final);

    for (int l = cfg.n_blocks - 1; l >= 0; --l) {
        const BlockParams& b = params.block_at_depth(l);
        BlockParams& gb = grads.block_at_depth(l);
        const LayerTrace& lt = trace.layers[l];

        // feed-forward sublayer: h_out = h_mid + gelu(ln2(h_mid) w1 + b1) w2 + b2
        gb.w2.noalias() += lt.ff_act.transpose() * dh;
        gb.b2.noalias() += dh.colwise().sum().transpose();
        Eigen::MatrixXd dz1 = dh * b.w2.transpose();
        dz1.array() *= lt.ff_pre.unaryExpr([](double x) { return gelu_grad(x); }).array();
        gb.w1.noalias() += lt.ln2_out.transpose() * dz1;
        gb.b1.noalias() += dz1.colwise().sum().transpose();
        const Eigen::MatrixXd dyn = dz1 * b.w1.transpose();
        dh += layernorm_backward(dyn, lt.ln2_xhat, lt.ln2_invstd, b.ln2, gb.ln2);

        // attention sublayer: h_mid = h_in + concat_heads(P_h V_h) wo + bo
        gb.attn.wo.noalias() += lt.attn_concat.transpose() * dh;
        gb.attn.bo.noalias() += dh.colwise().sum().transpose();
        const Eigen::MatrixXd dconcat = dh * b.attn.wo.transpose();

        Eigen::MatrixXd dq(n, cfg.d_model), dkm(n, cfg.d_model), dv(n, cfg.d_model);
        for (int hd = 0; hd < cfg.n_heads; ++hd) {
            const auto qh = lt.q.middleCols(hd * dk, dk);
            const auto kh = lt.k.middleCols(hd * dk, dk);
            const auto vh = lt.v.middleCols(hd * dk, dk);
            const Eigen::MatrixXd& ph = lt.attn_probs[hd];
            const auto doh = dconcat.middleCols(hd * dk, dk);

            Eigen::MatrixXd dp = doh * vh.transpose();
            dv.middleCols(hd * dk, dk).noalias() = ph.transpose() * doh;
            // softmax Jacobian: dS = P .* (dP - rowsum(dP .* P))
            const Eigen::VectorXd rowdot = (dp.array() * ph.array()).rowwise().sum().matrix();
            dp.colwise() -= rowdot;
            dp.array() *= ph.array();
            dq.middleCols(hd * dk, dk).noalias() = dp * kh * scale;
            dkm.middleCols(hd * dk, dk).noalias() = dp.transpose() * qh * scale;
        }

        gb.attn.wq.noalias() += lt.ln1_out.transpose() * dq;
        gb.attn.bq.noalias() += dq.colwise().sum().transpose();
        gb.attn.wk.noalias() += lt.ln1_out.transpose() * dkm;
        gb.attn.bk.noalias() += dkm.colwise().sum().transpose();
        gb.attn.wv.noalias() += lt.ln1_out.transpose() * dv;
        gb.attn.bv.noalias() += dv.colwise().sum().transpose();

        Eigen::MatrixXd dxn = dq * b.attn.wq.transpose();
        dxn.noalias() += dkm * b.attn.wk.transpose();
        dxn.noalias() += dv * b.attn.wv.transpose();
        dh += layernorm_backward(dxn, lt.ln1_xhat, lt.ln1_invstd, b.ln1, gb.ln1);
    }

    // positional encoding is additive and fixed; only the projection learns
    grads.w_in.noalias() += trace.input_cols.transpose() * dh;
    grads.b_in.noalias() += dh.colwise().sum().transpose();
}

}  // namespace msm
