#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "msm/model.hpp"
#include "msm/noise.hpp"
#include "msm/waveform.hpp"

namespace msm {

// Classical matched-sampling demodulator: read the symbol-aligned peak
// sample, undo the normalization gain and pick the nearest constellation
// point of the given (true) modulation, lowest global ID winning ties.
std::vector<std::uint16_t> baseline_demodulate(const Waveform& wave,
                                               const ModulationScheme& mod,
                                               const Vocabulary& vocab);

// Fraction of positions where predicted != truth.
double ser(const std::vector<std::uint16_t>& predicted,
           const std::vector<std::uint16_t>& truth);

// One result cell of a scenario run. Aggregate rows use modulation = "all";
// multi-seed averages use seed = 0 with averaged = true.
struct EvalRow {
    std::string scenario;
    std::string modulation;
    double gamma = 0.0;    // 0 for the clean scenario
    double snr_db = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    bool averaged = false;
    long targets = 0;
    long errors = 0;
    double ser = 0.0;
    double baseline_ser = std::numeric_limits<double>::quiet_NaN();
};

struct EvalReport {
    std::string scenario;
    std::vector<std::uint64_t> seeds;
    std::vector<EvalRow> rows;
    long total_targets = 0;

    // Impulsive-scenario statistics of the realized per-waveform hit rate.
    long waveforms = 0;
    long skipped_waveforms = 0;  // no hit symbols, hence no targets
    double mean_hit_rate = std::numeric_limits<double>::quiet_NaN();
    double hit_rate_coverage = std::numeric_limits<double>::quiet_NaN();
    double interval_lo = std::numeric_limits<double>::quiet_NaN();
    double interval_hi = std::numeric_limits<double>::quiet_NaN();
};

struct CleanEvalConfig {
    DatasetConfig dataset;
    std::optional<Modulation> modulation;  // nullopt: mixed over dataset.modulations
    int batches_per_seed = 9;
    int batch_size = 64;
    double mask_fraction = 0.15;
    int threads = 0;
    bool with_baseline = false;
};

// Random-mask evaluation on clean waveforms, the training condition. With the
// defaults each seed contributes batches_per_seed * batch_size waveforms and
// floor(mask_fraction * K) targets per waveform.
EvalReport run_clean_scenario(const ModelParams& params, const CleanEvalConfig& config,
                              const Vocabulary& vocab, const std::vector<std::uint64_t>& seeds);

struct ImpulsiveEvalConfig {
    DatasetConfig dataset;
    double gamma = 1e-3;
    std::vector<double> snr_grid_db = {-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
    double p_star = 0.15;  // calibrates the impulsive index for the symbol-hit rate
    int waveforms_per_snr = 600;  // per seed
    double coverage_delta = 0.05;
    int threads = 0;
    bool with_baseline = true;
};

// Impulse-guided masking scenario: corrupt with Middleton Class-A noise,
// identify hit symbols from the generator's counts, zero their spans, and
// score the model's predictions at exactly those symbols. The baseline
// demodulates the same symbols from the un-masked noisy waveform.
EvalReport run_impulsive_scenario(const ModelParams& params, const ImpulsiveEvalConfig& config,
                                  const Vocabulary& vocab,
                                  const std::vector<std::uint64_t>& seeds);

}  // namespace msm
