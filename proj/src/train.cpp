#include "msm/train.hpp"

#include <cmath>
#include <stdexcept>

#include "msm/masking.hpp"
#include "msm/parallel.hpp"

namespace msm {

namespace {
// Tags for deriving independent sub-streams from the master seed.
constexpr std::uint64_t kInitStream = 0x01;
constexpr std::uint64_t kDataStream = 0x02;
}  // namespace

void TrainConfig::validate() const {
    model.validate();
    if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (max_steps < 1) throw std::invalid_argument("train: max_steps must be >= 1");
    if (!(adam.learning_rate > 0.0))
        throw std::invalid_argument("train: learning_rate must be > 0");
    if (!(mask_fraction > 0.0 && mask_fraction < 1.0))
        throw std::invalid_argument("train: mask_fraction must be in (0, 1)");
    if (grad_clip_norm < 0.0) throw std::invalid_argument("train: grad_clip_norm must be >= 0");
}

Batch next_batch(const DatasetConfig& dataset, const Vocabulary& vocab, double mask_fraction,
                 int batch_size, std::uint64_t seed, long step) {
    Batch batch;
    batch.examples.resize(batch_size);
    const std::uint64_t step_seed =
        derive_seed(derive_seed(seed, kDataStream), static_cast<std::uint64_t>(step));
    for (int i = 0; i < batch_size; ++i) {
        RandomStream rng(derive_seed(step_seed, static_cast<std::uint64_t>(i)));
        TrainExample& ex = batch.examples[i];
        Waveform clean = generate_example(dataset, vocab, rng);
        ex.spec = random_mask(clean.num_symbols(), mask_fraction, clean.sps, rng);
        ex.targets.reserve(ex.spec.count());
        for (int sym : ex.spec.masked_symbols) ex.targets.push_back(clean.symbol_ids[sym]);
        ex.masked = apply_mask(std::move(clean), ex.spec);
        batch.total_targets += ex.spec.count();
    }
    return batch;
}

TrainState make_train_state(const ModelConfig& model, const AdamConfig& adam,
                            std::uint64_t seed) {
    TrainState st;
    RandomStream rng(derive_seed(seed, kInitStream));
    st.params = init_params(model, rng);
    st.m = make_zero_params(model);
    st.v = make_zero_params(model);
    st.adam = adam;
    return st;
}

void adam_step(TrainState& state, ModelParams& grads, double grad_clip_norm) {
    auto gv = tensor_views(grads);
    for (const TensorView& t : gv)
        for (Eigen::Index i = 0; i < t.size(); ++i)
            if (!std::isfinite(t.data[i]))
                throw std::runtime_error("adam_step: non-finite gradient in " + t.name +
                                         " at step " + std::to_string(state.step));

    if (grad_clip_norm > 0.0) {
        double sq = 0.0;
        for (const TensorView& t : gv)
            for (Eigen::Index i = 0; i < t.size(); ++i) sq += t.data[i] * t.data[i];
        const double norm = std::sqrt(sq);
        if (norm > grad_clip_norm) {
            const double s = grad_clip_norm / norm;
            for (const TensorView& t : gv)
                for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] *= s;
        }
    }

    state.step += 1;
    const double t_step = static_cast<double>(state.step);
    const AdamConfig& a = state.adam;
    const double bc1 = 1.0 - std::pow(a.beta1, t_step);
    const double bc2 = 1.0 - std::pow(a.beta2, t_step);

    auto pv = tensor_views(state.params);
    auto mv = tensor_views(state.m);
    auto vv = tensor_views(state.v);
    for (std::size_t k = 0; k < pv.size(); ++k) {
        double* p = pv[k].data;
        double* m = mv[k].data;
        double* v = vv[k].data;
        const double* g = gv[k].data;
        const Eigen::Index n = pv[k].size();
        for (Eigen::Index i = 0; i < n; ++i) {
            m[i] = a.beta1 * m[i] + (1.0 - a.beta1) * g[i];
            v[i] = a.beta2 * v[i] + (1.0 - a.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= a.learning_rate * mhat / (std::sqrt(vhat) + a.epsilon);
        }
    }
}

std::vector<double> inverse_frequency_weights(const Vocabulary& vocab,
                                              const DatasetConfig& dataset) {
    const std::vector<double> freq = class_frequencies(vocab, dataset.modulations);
    std::vector<double> weights(freq.size(), 0.0);
    double sum = 0.0;
    long active = 0;
    for (std::size_t c = 0; c < freq.size(); ++c) {
        if (freq[c] > 0.0) {
            weights[c] = 1.0 / freq[c];
            sum += weights[c];
            ++active;
        }
    }
    // Mean-1 normalization; the loss normalizes by the per-batch weight sum
    // anyway, this just keeps reported magnitudes readable.
    const double scale = static_cast<double>(active) / sum;
    for (double& w : weights) w *= scale;
    return weights;
}

StepStats batch_gradient(const ModelParams& params, const Batch& batch,
                         const std::vector<double>& class_weights, int threads,
                         ModelParams& grads) {
    const int n_ex = static_cast<int>(batch.examples.size());
    const int n_workers = std::min(resolve_threads(threads), std::max(1, n_ex));

    struct WorkerAcc {
        ModelParams grads;
        double weighted_ce = 0.0;
        double weight_sum = 0.0;
        long correct = 0;
        long total = 0;
    };
    std::vector<WorkerAcc> acc(n_workers);
    for (WorkerAcc& a : acc) a.grads = make_zero_params(params.config);

    parallel_chunks(n_ex, n_workers, [&](int worker, int begin, int end) {
        WorkerAcc& a = acc[worker];
        Eigen::MatrixXd dlogits;
        for (int i = begin; i < end; ++i) {
            const TrainExample& ex = batch.examples[i];
            const ForwardTrace trace = forward(params, ex.masked, ex.spec);
            const MaskedLoss ml =
                masked_cross_entropy(trace.logits, ex.targets, class_weights, &dlogits);
            backward(params, trace, dlogits, a.grads);
            a.weighted_ce += ml.weighted_ce;
            a.weight_sum += ml.weight_sum;
            a.correct += ml.correct;
            a.total += static_cast<long>(ex.targets.size());
        }
    });

    double weighted_ce = 0.0, weight_sum = 0.0;
    long correct = 0, total = 0;
    auto gv = tensor_views(grads);
    for (int w = 0; w < n_workers; ++w) {
        auto av = tensor_views(acc[w].grads);
        for (std::size_t k = 0; k < gv.size(); ++k)
            for (Eigen::Index i = 0; i < gv[k].size(); ++i) gv[k].data[i] += av[k].data[i];
        weighted_ce += acc[w].weighted_ce;
        weight_sum += acc[w].weight_sum;
        correct += acc[w].correct;
        total += acc[w].total;
    }

    // Batch loss is sum(w * ce) / sum(w); gradients were accumulated for the
    // numerator, so one global scale finishes the job.
    const double inv = 1.0 / weight_sum;
    for (auto& t : gv)
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] *= inv;

    StepStats s;
    s.loss = weighted_ce * inv;
    s.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    return s;
}

TrainResult train(const TrainConfig& config, const Vocabulary& vocab,
                  const StepCallback& on_step) {
    config.validate();
    const std::vector<double> class_weights = inverse_frequency_weights(vocab, config.dataset);

    TrainResult result;
    result.state = make_train_state(config.model, config.adam, config.seed);
    result.curve.reserve(config.max_steps);

    ModelParams grads = make_zero_params(config.model);
    for (long step = 0; step < config.max_steps; ++step) {
        const Batch batch = next_batch(config.dataset, vocab, config.mask_fraction,
                                       config.batch_size, config.seed, step);
        auto gv = tensor_views(grads);
        for (auto& t : gv)
            for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] = 0.0;

        StepStats stats =
            batch_gradient(result.state.params, batch, class_weights, config.threads, grads);
        stats.step = step;
        if (!std::isfinite(stats.loss))
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step));

        adam_step(result.state, grads, config.grad_clip_norm);
        result.curve.push_back(stats);
        if (on_step) on_step(result.state, stats);
    }
    return result;
}

}  // namespace msm
