#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "msm/model.hpp"
#include "msm/waveform.hpp"

namespace msm {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct TrainConfig {
    ModelConfig model;
    DatasetConfig dataset;
    AdamConfig adam;
    int batch_size = 64;
    long max_steps = 1000;
    std::uint64_t seed = 1;
    double mask_fraction = 0.15;
    double grad_clip_norm = 0.0;  // 0 disables clipping
    long checkpoint_every = 0;    // 0 means final checkpoint only
    int threads = 0;              // 0 means hardware concurrency

    void validate() const;
};

// One self-supervised example: a clean waveform with a random mask applied
// and the ground-truth ids at the masked positions.
struct TrainExample {
    Waveform masked;
    MaskSpec spec;
    std::vector<std::uint16_t> targets;
};

struct Batch {
    std::vector<TrainExample> examples;
    long total_targets = 0;
};

// Streaming batch: every example is freshly generated from a seed derived
// from (seed, step, index), so batches are reproducible and independent of
// how work is distributed over threads.
Batch next_batch(const DatasetConfig& dataset, const Vocabulary& vocab, double mask_fraction,
                 int batch_size, std::uint64_t seed, long step);

struct TrainState {
    long step = 0;
    ModelParams params;
    ModelParams m;  // Adam first moments
    ModelParams v;  // Adam second moments
    AdamConfig adam;
};

TrainState make_train_state(const ModelConfig& model, const AdamConfig& adam,
                            std::uint64_t seed);

// Standard Adam update with bias correction. grads must hold the gradient of
// the (normalized) loss. Throws on non-finite gradients; the state is left
// untouched in that case.
void adam_step(TrainState& state, ModelParams& grads, double grad_clip_norm = 0.0);

struct StepStats {
    long step = 0;
    double loss = 0.0;
    double accuracy = 0.0;  // argmax accuracy over the batch's masked symbols
};

struct TrainResult {
    TrainState state;
    std::vector<StepStats> curve;
};

// Inverse-frequency class weights for the given dataset's sampling
// distribution, normalized to mean 1 over the classes that can occur.
std::vector<double> inverse_frequency_weights(const Vocabulary& vocab,
                                              const DatasetConfig& dataset);

// Computes the batch gradient (normalized by the batch's total target
// weight) into grads and returns the loss/accuracy stats. Exposed separately
// from train() for overfitting experiments on a fixed batch.
StepStats batch_gradient(const ModelParams& params, const Batch& batch,
                         const std::vector<double>& class_weights, int threads,
                         ModelParams& grads);

using StepCallback = std::function<void(const TrainState&, const StepStats&)>;

// Full streaming loop: generate, mask, forward/backward, Adam. No epoch
// semantics; data is drawn fresh every step.
TrainResult train(const TrainConfig& config, const Vocabulary& vocab,
                  const StepCallback& on_step = nullptr);

}  // namespace msm
