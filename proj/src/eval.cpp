#include "msm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "msm/masking.hpp"
#include "msm/parallel.hpp"

namespace msm {

namespace {

constexpr std::uint64_t kCleanStream = 0x11;
constexpr std::uint64_t kImpulsiveStream = 0x12;

std::vector<std::uint16_t> argmax_ids(const Eigen::MatrixXd& logits) {
    std::vector<std::uint16_t> out(logits.rows());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        Eigen::Index best;
        logits.row(r).maxCoeff(&best);
        out[static_cast<std::size_t>(r)] = static_cast<std::uint16_t>(best);
    }
    return out;
}

struct Tally {
    long targets = 0;
    long errors = 0;
    long baseline_errors = 0;
    bool has_baseline = false;
};

using TallyKey = std::pair<int, int>;  // (snr index or -1, modulation index)

void add_rows(EvalReport& report, const std::string& scenario, double gamma,
              const std::vector<double>& snr_grid, std::uint64_t seed,
              const std::map<TallyKey, Tally>& tallies) {
    for (const auto& [key, t] : tallies) {
        EvalRow row;
        row.scenario = scenario;
        row.gamma = gamma;
        row.snr_db = key.first >= 0 ? snr_grid[key.first]
                                    : std::numeric_limits<double>::quiet_NaN();
        row.modulation = key.second >= 0 ? to_string(static_cast<Modulation>(key.second)) : "all";
        row.seed = seed;
        row.targets = t.targets;
        row.errors = t.errors;
        row.ser = t.targets > 0 ? static_cast<double>(t.errors) / t.targets : 0.0;
        if (t.has_baseline && t.targets > 0)
            row.baseline_ser = static_cast<double>(t.baseline_errors) / t.targets;
        report.rows.push_back(std::move(row));
    }
}

// Multi-seed averages per (snr, modulation) cell, appended after the
// per-seed rows. SER averages are over per-seed SERs, matching the
// "average performance over seeds" protocol.
void add_seed_averages(EvalReport& report) {
    struct Cell {
        double ser_sum = 0, base_sum = 0;
        long targets = 0, errors = 0;
        int n = 0, n_base = 0;
    };
    std::map<std::pair<double, std::string>, Cell> agg;
    for (const EvalRow& r : report.rows) {
        if (r.averaged) continue;
        auto& c = agg[{r.snr_db, r.modulation}];
        c.ser_sum += r.ser;
        c.targets += r.targets;
        c.errors += r.errors;
        c.n += 1;
        if (!std::isnan(r.baseline_ser)) {
            c.base_sum += r.baseline_ser;
            c.n_base += 1;
        }
    }
    for (const auto& [key, c] : agg) {
        EvalRow row;
        row.scenario = report.scenario;
        row.gamma = report.rows.empty() ? 0.0 : report.rows.front().gamma;
        row.snr_db = key.first;
        row.modulation = key.second;
        row.averaged = true;
        row.targets = c.targets;
        row.errors = c.errors;
        row.ser = c.ser_sum / c.n;
        if (c.n_base > 0) row.baseline_ser = c.base_sum / c.n_base;
        report.rows.push_back(std::move(row));
    }
}

}  // namespace

std::vector<std::uint16_t> baseline_demodulate(const Waveform& wave,
                                               const ModulationScheme& mod,
                                               const Vocabulary& vocab) {
    const auto& member_ids = vocab.members[static_cast<int>(mod.name)];
    std::vector<std::complex<double>> points(mod.points.size());
    for (std::size_t j = 0; j < mod.points.size(); ++j) points[j] = mod.points[j].value();

    const double inv_gain = 1.0 / wave.meta.gain;
    std::vector<std::uint16_t> out(wave.num_symbols());
    for (int i = 0; i < wave.num_symbols(); ++i) {
        const int peak = i * wave.sps;
        const std::complex<double> r(wave.i_samples[peak] * inv_gain,
                                     wave.q_samples[peak] * inv_gain);
        double best_d = std::numeric_limits<double>::infinity();
        std::uint16_t best_id = 0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            const double d = std::norm(r - points[j]);
            const std::uint16_t id = member_ids[j];
            if (d < best_d || (d == best_d && id < best_id)) {
                best_d = d;
                best_id = id;
            }
        }
        out[i] = best_id;
    }
    return out;
}

double ser(const std::vector<std::uint16_t>& predicted, const std::vector<std::uint16_t>& truth) {
    if (predicted.size() != truth.size() || predicted.empty())
        throw std::invalid_argument("ser: sequences must have equal nonzero length");
    long errors = 0;
    for (std::size_t i = 0; i < truth.size(); ++i)
        if (predicted[i] != truth[i]) ++errors;
    return static_cast<double>(errors) / static_cast<double>(truth.size());
}

EvalReport run_clean_scenario(const ModelParams& params, const CleanEvalConfig& config,
                              const Vocabulary& vocab, const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("run_clean_scenario: no seeds");
    DatasetConfig dataset = config.dataset;
    if (config.modulation) dataset.modulations = {*config.modulation};

    EvalReport report;
    report.scenario = "clean";
    report.seeds = seeds;

    struct ExampleResult {
        int mod;
        long targets = 0, errors = 0, baseline_errors = 0;
    };

    for (const std::uint64_t seed : seeds) {
        const int n_examples = config.batches_per_seed * config.batch_size;
        std::vector<ExampleResult> results(n_examples);
        parallel_chunks(n_examples, resolve_threads(config.threads), [&](int, int begin, int end) {
            for (int i = begin; i < end; ++i) {
                const long batch = i / config.batch_size;
                const long in_batch = i % config.batch_size;
                const std::uint64_t batch_seed = derive_seed(
                    derive_seed(derive_seed(seed, kCleanStream), static_cast<std::uint64_t>(batch)),
                    static_cast<std::uint64_t>(in_batch));
                RandomStream rng(batch_seed);

                Waveform clean = generate_example(dataset, vocab, rng);
                const MaskSpec spec =
                    random_mask(clean.num_symbols(), config.mask_fraction, clean.sps, rng);
                std::vector<std::uint16_t> truth;
                truth.reserve(spec.count());
                for (int sym : spec.masked_symbols) truth.push_back(clean.symbol_ids[sym]);

                ExampleResult& res = results[i];
                res.mod = static_cast<int>(clean.meta.modulation);
                res.targets = spec.count();

                if (config.with_baseline) {
                    const auto base =
                        baseline_demodulate(clean, scheme(clean.meta.modulation), vocab);
                    for (int k = 0; k < spec.count(); ++k)
                        if (base[spec.masked_symbols[k]] != truth[k]) ++res.baseline_errors;
                }

                const Waveform masked = apply_mask(std::move(clean), spec);
                const auto pred = argmax_ids(forward_logits(params, masked, spec));
                for (int k = 0; k < spec.count(); ++k)
                    if (pred[k] != truth[k]) ++res.errors;
            }
        });

        std::map<TallyKey, Tally> tallies;
        for (const ExampleResult& res : results) {
            for (const TallyKey& key : {TallyKey{-1, res.mod}, TallyKey{-1, -1}}) {
                Tally& t = tallies[key];
                t.targets += res.targets;
                t.errors += res.errors;
                t.baseline_errors += res.baseline_errors;
                t.has_baseline = config.with_baseline;
            }
        }
        report.total_targets += tallies[{-1, -1}].targets;
        add_rows(report, "clean", 0.0, {}, seed, tallies);
    }
    add_seed_averages(report);
    return report;
}

EvalReport run_impulsive_scenario(const ModelParams& params, const ImpulsiveEvalConfig& config,
                                  const Vocabulary& vocab,
                                  const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw std::invalid_argument("run_impulsive_scenario: no seeds");
    if (config.snr_grid_db.empty())
        throw std::invalid_argument("run_impulsive_scenario: empty SNR grid");

    const double a_index = calibrate_impulsive_index(config.p_star, config.dataset.sps);
    const ConcentrationReport conc = concentration_epsilon(
        symbol_hit_probability(a_index, config.dataset.sps), config.dataset.symbols_per_waveform,
        config.coverage_delta);

    EvalReport report;
    report.scenario = "impulsive";
    report.seeds = seeds;
    report.interval_lo = conc.lo;
    report.interval_hi = conc.hi;

    struct ExampleResult {
        int mod = 0;
        long targets = 0, errors = 0, baseline_errors = 0;
        double hit_rate = 0.0;
        bool skipped = false;
    };

    double hit_rate_sum = 0.0;
    long covered = 0;

    for (const std::uint64_t seed : seeds) {
        for (std::size_t si = 0; si < config.snr_grid_db.size(); ++si) {
            // Unit signal power: waveforms are normalized.
            const NoiseParams noise =
                params_from_snr(config.snr_grid_db[si], config.gamma, a_index, 1.0);

            std::vector<ExampleResult> results(config.waveforms_per_snr);
            parallel_chunks(
                config.waveforms_per_snr, resolve_threads(config.threads),
                [&](int, int begin, int end) {
                    for (int i = begin; i < end; ++i) {
                        const std::uint64_t ex_seed = derive_seed(
                            derive_seed(derive_seed(seed, kImpulsiveStream), si),
                            static_cast<std::uint64_t>(i));
                        RandomStream rng(ex_seed);

                        Waveform wave = generate_example(config.dataset, vocab, rng);
                        const NoiseRealization z = sample_noise(noise, wave.num_samples(), rng);
                        for (int n = 0; n < wave.num_samples(); ++n) {
                            wave.i_samples[n] += z.z_i[n];
                            wave.q_samples[n] += z.z_q[n];
                        }

                        const std::vector<int> hits = hit_symbols(z.counts, wave.sps);
                        ExampleResult& res = results[i];
                        res.mod = static_cast<int>(wave.meta.modulation);
                        res.hit_rate = static_cast<double>(hits.size()) /
                                       static_cast<double>(wave.num_symbols());
                        if (hits.empty()) {
                            res.skipped = true;
                            continue;
                        }

                        const MaskSpec spec = impulse_guided_mask(hits, wave.sps);
                        std::vector<std::uint16_t> truth;
                        truth.reserve(spec.count());
                        for (int sym : spec.masked_symbols)
                            truth.push_back(wave.symbol_ids[sym]);
                        res.targets = spec.count();

                        if (config.with_baseline) {
                            const auto base =
                                baseline_demodulate(wave, scheme(wave.meta.modulation), vocab);
                            for (int k = 0; k < spec.count(); ++k)
                                if (base[spec.masked_symbols[k]] != truth[k])
                                    ++res.baseline_errors;
                        }

                        const Waveform masked = apply_mask(std::move(wave), spec);
                        const auto pred = argmax_ids(forward_logits(params, masked, spec));
                        for (int k = 0; k < spec.count(); ++k)
                            if (pred[k] != truth[k]) ++res.errors;
                    }
                });

            std::map<TallyKey, Tally> tallies;
            for (const ExampleResult& res : results) {
                ++report.waveforms;
                hit_rate_sum += res.hit_rate;
                if (res.hit_rate >= conc.lo && res.hit_rate <= conc.hi) ++covered;
                if (res.skipped) {
                    ++report.skipped_waveforms;
                    continue;
                }
                const int s = static_cast<int>(si);
                for (const TallyKey& key : {TallyKey{s, res.mod}, TallyKey{s, -1}}) {
                    Tally& t = tallies[key];
                    t.targets += res.targets;
                    t.errors += res.errors;
                    t.baseline_errors += res.baseline_errors;
                    t.has_baseline = config.with_baseline;
                }
                report.total_targets += res.targets;
            }
            add_rows(report, "impulsive", config.gamma, config.snr_grid_db, seed, tallies);
        }
    }
    report.mean_hit_rate = hit_rate_sum / static_cast<double>(report.waveforms);
    report.hit_rate_coverage =
        static_cast<double>(covered) / static_cast<double>(report.waveforms);
    add_seed_averages(report);
    return report;
}

}  // namespace msm
