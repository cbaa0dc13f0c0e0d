// Command-line front end: waveform generation, noise calibration, masking,
// training and evaluation, with a reproducibility manifest per run.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msm/eval.hpp"
#include "msm/io.hpp"
#include "msm/masking.hpp"
#include "msm/noise.hpp"
#include "msm/train.hpp"

namespace fs = std::filesystem;
using namespace msm;

namespace {

// Exit codes: 0 ok, 2 usage, 3 malformed config, 4 missing file, 1 other.
struct MissingFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const fs::path& path, const std::string& what) {
    if (!fs::exists(path)) throw MissingFile(what + " not found: " + path.string());
}

nlohmann::json load_config_file(const fs::path& path) {
    require_file(path, "config file");
    try {
        return load_json_file(path);
    } catch (const nlohmann::json::exception& e) {
        throw BadConfig("malformed config " + path.string() + ": " + e.what());
    }
}

class ManifestScope {
  public:
    ManifestScope(std::string subcommand, fs::path path)
        : path_(std::move(path)), start_(std::chrono::steady_clock::now()) {
        manifest_.subcommand = std::move(subcommand);
    }
    RunManifest& manifest() { return manifest_; }
    void add_output(const fs::path& p) { manifest_.outputs.push_back(p.string()); }
    void commit() {
        manifest_.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_manifest(path_, manifest_);
    }

  private:
    RunManifest manifest_;
    fs::path path_;
    std::chrono::steady_clock::time_point start_;
};

std::vector<std::uint64_t> default_seeds() { return {1, 2, 3}; }

int cmd_vocab(const std::string& out_path, const fs::path& manifest_path) {
    ManifestScope ms("vocab", manifest_path);
    const Vocabulary vocab = build_vocabulary();

    std::FILE* out = stdout;
    if (!out_path.empty()) {
        out = std::fopen(out_path.c_str(), "w");
        if (!out) throw std::runtime_error("cannot open " + out_path);
        ms.add_output(out_path);
    }
    std::fprintf(out, "%5s %12s %12s %14s  %s\n", "id", "i", "q", "freq", "modulations");
    for (int id = 0; id < vocab.size(); ++id) {
        const auto pt = vocab.entries[id].value();
        std::string mods;
        for (Modulation m : kAllModulations) {
            for (std::uint16_t member : vocab.members[static_cast<int>(m)]) {
                if (member == id) {
                    if (!mods.empty()) mods += ",";
                    mods += to_string(m);
                    break;
                }
            }
        }
        std::fprintf(out, "%5d %12.8f %12.8f %14.8e  %s\n", id, pt.real(), pt.imag(),
                     vocab.class_freq[id], mods.c_str());
    }
    if (out != stdout) std::fclose(out);
    ms.commit();
    return 0;
}

struct GenOptions {
    std::string out_dir;
    int count = 1;
    std::string modulation = "mixed";
    double beta = 0.0;  // 0: sample from the table
    int span = 0;       // 0: sample from the table
    int symbols = 128;
    int sps = kDefaultSps;
    std::uint64_t seed = 1;
    bool json_sidecar = false;
};

int cmd_gen(const GenOptions& opt, fs::path manifest_path) {
    fs::create_directories(opt.out_dir);
    if (manifest_path.empty()) manifest_path = fs::path(opt.out_dir) / "gen-manifest.json";
    ManifestScope ms("gen", manifest_path);

    DatasetConfig dataset;
    dataset.symbols_per_waveform = opt.symbols;
    dataset.sps = opt.sps;
    if (opt.modulation != "mixed") dataset.modulations = {modulation_from_string(opt.modulation)};
    if (opt.beta > 0.0) dataset.roll_offs = {opt.beta};
    if (opt.span > 0) dataset.spans = {opt.span};

    ms.manifest().config = {{"dataset", dataset_config_to_json(dataset)},
                            {"count", opt.count},
                            {"json_sidecar", opt.json_sidecar}};
    ms.manifest().seeds = {opt.seed};

    const Vocabulary vocab = build_vocabulary();
    for (int i = 0; i < opt.count; ++i) {
        RandomStream rng(derive_seed(opt.seed, static_cast<std::uint64_t>(i)));
        const Waveform wave = generate_example(dataset, vocab, rng);
        char name[32];
        std::snprintf(name, sizeof(name), "wave_%06d.msmw", i);
        const fs::path path = fs::path(opt.out_dir) / name;
        write_waveform(path, wave);
        ms.add_output(path);
        if (opt.json_sidecar) {
            fs::path jpath = path;
            jpath.replace_extension(".json");
            write_waveform_json(jpath, wave);
            ms.add_output(jpath);
        }
    }
    ms.commit();
    std::printf("wrote %d waveform(s) to %s\n", opt.count, opt.out_dir.c_str());
    return 0;
}

int cmd_noise_calibrate(double p_star, int sps, int symbols, double delta,
                        const fs::path& manifest_path) {
    ManifestScope ms("noise-calibrate", manifest_path);
    ms.manifest().config = {
        {"p_star", p_star}, {"sps", sps}, {"symbols", symbols}, {"delta", delta}};

    const double a = calibrate_impulsive_index(p_star, sps);
    const double p_sym = symbol_hit_probability(a, sps);
    const ConcentrationReport rep = concentration_epsilon(p_sym, symbols, delta);
    const double eps_exact = concentration_epsilon_exact(p_sym, symbols, delta);

    std::printf("A*          = %.10f\n", a);
    std::printf("p_sample    = %.10f\n", sample_hit_probability(a));
    std::printf("p_sym       = %.10f\n", p_sym);
    std::printf("epsilon     = %.6f   (quadratic approximation, delta = %g)\n", rep.epsilon,
                delta);
    std::printf("epsilon_kl  = %.6f   (exact KL inversion)\n", eps_exact);
    std::printf("interval    = [%.6f, %.6f]\n", rep.lo, rep.hi);
    if (!rep.in_validity_range)
        std::printf("warning: epsilon >= min(p, 1-p); bound outside its validity range\n");
    ms.commit();
    return 0;
}

int cmd_noise_stats(double a, double p_star, int sps, int symbols, int waveforms,
                    std::uint64_t seed, const std::string& out_path,
                    const fs::path& manifest_path) {
    ManifestScope ms("noise-stats", manifest_path);
    if (a <= 0.0) a = calibrate_impulsive_index(p_star, sps);
    ms.manifest().config = {
        {"a", a}, {"sps", sps}, {"symbols", symbols}, {"waveforms", waveforms}};
    ms.manifest().seeds = {seed};

    std::vector<long> histogram(symbols + 1, 0);
    RandomStream rng(seed);
    double hit_sum = 0.0;
    std::vector<int> counts(symbols * sps);
    for (int w = 0; w < waveforms; ++w) {
        for (int& c : counts) c = rng.poisson(a);
        const auto hits = hit_symbols(counts, sps);
        histogram[hits.size()] += 1;
        hit_sum += static_cast<double>(hits.size()) / symbols;
    }

    std::FILE* out = stdout;
    if (!out_path.empty()) {
        out = std::fopen(out_path.c_str(), "w");
        if (!out) throw std::runtime_error("cannot open " + out_path);
        ms.add_output(out_path);
    }
    std::fprintf(out, "hit_symbols,waveforms,fraction\n");
    for (int h = 0; h <= symbols; ++h)
        if (histogram[h] > 0)
            std::fprintf(out, "%d,%ld,%.8f\n", h, histogram[h],
                         static_cast<double>(histogram[h]) / waveforms);
    if (out != stdout) std::fclose(out);

    std::fprintf(stderr, "mean hit rate over %d waveforms: %.6f (expected %.6f)\n", waveforms,
                 hit_sum / waveforms, symbol_hit_probability(a, sps));
    ms.commit();
    return 0;
}

struct MaskOptions {
    std::string in_path;
    std::string out_path;
    std::string spec_path;
    double random_fraction = 0.0;
    std::uint64_t seed = 1;
    std::string emit_spec;
};

int cmd_mask(const MaskOptions& opt, const fs::path& manifest_path) {
    ManifestScope ms("mask", manifest_path);
    require_file(opt.in_path, "waveform");
    const Waveform wave = read_waveform(opt.in_path);

    MaskSpec spec;
    if (!opt.spec_path.empty()) {
        require_file(opt.spec_path, "mask spec");
        try {
            spec = mask_spec_from_json(load_json_file(opt.spec_path));
        } catch (const nlohmann::json::exception& e) {
            throw BadConfig("malformed mask spec: " + std::string(e.what()));
        }
    } else if (opt.random_fraction > 0.0) {
        RandomStream rng(opt.seed);
        spec = random_mask(wave.num_symbols(), opt.random_fraction, wave.sps, rng);
    } else {
        throw BadConfig("mask: either --spec or --random must be given");
    }

    write_waveform(opt.out_path, apply_mask(wave, spec));
    ms.add_output(opt.out_path);
    if (!opt.emit_spec.empty()) {
        write_json_file(opt.emit_spec, mask_spec_to_json(spec));
        ms.add_output(opt.emit_spec);
    }
    ms.manifest().config = {{"spec", mask_spec_to_json(spec)}, {"in", opt.in_path}};
    ms.manifest().seeds = {opt.seed};
    ms.commit();
    std::printf("masked %d symbol(s) -> %s\n", spec.count(), opt.out_path.c_str());
    return 0;
}

int cmd_train(const TrainConfig& config, const std::string& out_dir,
              fs::path manifest_path) {
    fs::create_directories(out_dir);
    if (manifest_path.empty()) manifest_path = fs::path(out_dir) / "train-manifest.json";
    ManifestScope ms("train", manifest_path);
    ms.manifest().config = train_config_to_json(config);
    ms.manifest().seeds = {config.seed};

    const Vocabulary vocab = build_vocabulary();
    const long report_every = std::max<long>(1, config.max_steps / 50);

    const StepCallback on_step = [&](const TrainState& state, const StepStats& stats) {
        if (stats.step % report_every == 0 || stats.step + 1 == config.max_steps)
            std::printf("step %6ld  loss %.4f  acc %.4f\n", stats.step, stats.loss,
                        stats.accuracy);
        if (config.checkpoint_every > 0 && state.step % config.checkpoint_every == 0 &&
            state.step < config.max_steps) {
            char name[32];
            std::snprintf(name, sizeof(name), "ckpt_%06ld.msmc", state.step);
            save_checkpoint(fs::path(out_dir) / name, state.params);
        }
    };

    const TrainResult result = train(config, vocab, on_step);

    const fs::path final_path = fs::path(out_dir) / "final.msmc";
    save_checkpoint(final_path, result.state.params);
    ms.add_output(final_path);
    const fs::path curve_path = fs::path(out_dir) / "loss.csv";
    write_loss_curve_csv(curve_path, result.curve);
    ms.add_output(curve_path);
    ms.commit();
    std::printf("final checkpoint: %s\n", final_path.c_str());
    return 0;
}

struct EvalOptions {
    std::string checkpoint;
    std::string scenario;
    std::vector<std::uint64_t> seeds = default_seeds();
    std::string out_path = "report.json";
    std::string csv_path;
    int threads = 0;
    // clean
    std::string modulation = "mixed";
    int batches = 9;
    int batch_size = 64;
    double mask_fraction = 0.15;
    bool baseline = false;
    // impulsive
    double gamma = 1e-3;
    std::vector<double> snr_grid = {-5, 0, 5, 10, 15, 20, 25};
    double p_star = 0.15;
    int waveforms_per_snr = 600;
    // dataset
    std::vector<std::string> mods;
    int symbols = 128;
    int sps = kDefaultSps;
};

int cmd_eval(const EvalOptions& opt, const fs::path& manifest_path) {
    ManifestScope ms("eval", manifest_path);
    require_file(opt.checkpoint, "checkpoint");
    const ModelParams params = load_checkpoint(opt.checkpoint);
    const Vocabulary vocab = build_vocabulary();

    DatasetConfig dataset;
    dataset.symbols_per_waveform = opt.symbols;
    dataset.sps = opt.sps;
    if (!opt.mods.empty()) {
        dataset.modulations.clear();
        for (const std::string& m : opt.mods)
            dataset.modulations.push_back(modulation_from_string(m));
    }

    EvalReport report;
    if (opt.scenario == "clean") {
        CleanEvalConfig cfg;
        cfg.dataset = dataset;
        if (opt.modulation != "mixed") cfg.modulation = modulation_from_string(opt.modulation);
        cfg.batches_per_seed = opt.batches;
        cfg.batch_size = opt.batch_size;
        cfg.mask_fraction = opt.mask_fraction;
        cfg.threads = opt.threads;
        cfg.with_baseline = opt.baseline;
        report = run_clean_scenario(params, cfg, vocab, opt.seeds);
    } else if (opt.scenario == "impulsive") {
        ImpulsiveEvalConfig cfg;
        cfg.dataset = dataset;
        cfg.gamma = opt.gamma;
        cfg.snr_grid_db = opt.snr_grid;
        cfg.p_star = opt.p_star;
        cfg.waveforms_per_snr = opt.waveforms_per_snr;
        cfg.threads = opt.threads;
        cfg.with_baseline = opt.baseline;
        report = run_impulsive_scenario(params, cfg, vocab, opt.seeds);
    } else {
        throw BadConfig("eval: unknown scenario '" + opt.scenario + "'");
    }

    write_json_file(opt.out_path, report_to_json(report));
    ms.add_output(opt.out_path);
    if (!opt.csv_path.empty()) {
        write_report_csv(opt.csv_path, report);
        ms.add_output(opt.csv_path);
    }
    ms.manifest().config = {{"checkpoint", opt.checkpoint},
                            {"scenario", opt.scenario},
                            {"dataset", dataset_config_to_json(dataset)}};
    ms.manifest().seeds = opt.seeds;
    ms.commit();
    std::printf("report: %s (%ld targets)\n", opt.out_path.c_str(), report.total_targets);
    return 0;
}

int cmd_report(const std::string& in_path) {
    require_file(in_path, "report");
    const EvalReport report = report_from_json(load_json_file(in_path));

    std::printf("scenario: %s   seeds:", report.scenario.c_str());
    for (auto s : report.seeds) std::printf(" %llu", static_cast<unsigned long long>(s));
    std::printf("   total targets: %ld\n", report.total_targets);
    if (report.waveforms > 0) {
        std::printf("waveforms: %ld (skipped with no hits: %ld)\n", report.waveforms,
                    report.skipped_waveforms);
        std::printf("mean hit rate: %.4f   coverage of [%.6f, %.6f]: %.2f%%\n",
                    report.mean_hit_rate, report.interval_lo, report.interval_hi,
                    100.0 * report.hit_rate_coverage);
    }
    std::printf("\n%-10s %8s %8s %10s %10s %12s\n", "modulation", "gamma", "snr_db", "targets",
                "ser", "baseline_ser");
    for (const EvalRow& r : report.rows) {
        if (!r.averaged) continue;
        std::printf("%-10s %8g ", r.modulation.c_str(), r.gamma);
        if (std::isnan(r.snr_db))
            std::printf("%8s", "-");
        else
            std::printf("%8.1f", r.snr_db);
        std::printf(" %10ld %10.5f", r.targets, r.ser);
        if (std::isnan(r.baseline_ser))
            std::printf(" %12s\n", "-");
        else
            std::printf(" %12.5f\n", r.baseline_ser);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Masked-symbol modeling laboratory for oversampled baseband signals"};
    app.require_subcommand(1);

    std::string manifest_path;
    app.add_option("--manifest", manifest_path,
                   "Manifest output path (default: alongside the primary output)");

    // vocab
    auto* vocab_cmd = app.add_subcommand("vocab", "Dump the 272-entry symbol vocabulary");
    std::string vocab_out;
    vocab_cmd->add_option("--out", vocab_out, "Write the table to a file instead of stdout");

    // gen
    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate waveform files");
    gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")->required();
    gen_cmd->add_option("--count", gen.count, "Number of waveforms");
    gen_cmd->add_option("--modulation", gen.modulation, "Modulation name or 'mixed'");
    gen_cmd->add_option("--beta", gen.beta, "Fix the roll-off instead of sampling it");
    gen_cmd->add_option("--span", gen.span, "Fix the filter span instead of sampling it");
    gen_cmd->add_option("--symbols", gen.symbols, "Symbols per waveform (K)");
    gen_cmd->add_option("--sps", gen.sps, "Samples per symbol (L)");
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_flag("--json", gen.json_sidecar, "Also write JSON sidecars");

    // noise-calibrate
    double nc_p_star = 0.15, nc_delta = 0.05;
    int nc_sps = kDefaultSps, nc_symbols = 128;
    auto* nc_cmd =
        app.add_subcommand("noise-calibrate", "Impulsive-index calibration and tail bounds");
    nc_cmd->add_option("--p-star", nc_p_star, "Target symbol-hit rate");
    nc_cmd->add_option("--sps", nc_sps, "Samples per symbol (L)");
    nc_cmd->add_option("--symbols", nc_symbols, "Symbols per waveform (K)");
    nc_cmd->add_option("--delta", nc_delta, "Tail probability");

    // noise-stats
    double ns_a = 0.0, ns_p_star = 0.15;
    int ns_sps = kDefaultSps, ns_symbols = 128, ns_waveforms = 10000;
    std::uint64_t ns_seed = 1;
    std::string ns_out;
    auto* ns_cmd = app.add_subcommand("noise-stats", "Monte-Carlo symbol-hit histogram (CSV)");
    ns_cmd->add_option("--a", ns_a, "Impulsive index (overrides --p-star)");
    ns_cmd->add_option("--p-star", ns_p_star, "Target symbol-hit rate used to derive A");
    ns_cmd->add_option("--sps", ns_sps, "Samples per symbol (L)");
    ns_cmd->add_option("--symbols", ns_symbols, "Symbols per waveform (K)");
    ns_cmd->add_option("--waveforms", ns_waveforms, "Number of simulated waveforms");
    ns_cmd->add_option("--seed", ns_seed, "Random seed");
    ns_cmd->add_option("--out", ns_out, "CSV output path (default stdout)");

    // mask
    MaskOptions mask;
    auto* mask_cmd = app.add_subcommand("mask", "Apply a mask spec to a waveform file");
    mask_cmd->add_option("--in", mask.in_path, "Input waveform")->required();
    mask_cmd->add_option("--out", mask.out_path, "Output waveform")->required();
    mask_cmd->add_option("--spec", mask.spec_path, "Mask spec JSON");
    mask_cmd->add_option("--random", mask.random_fraction, "Random mask fraction");
    mask_cmd->add_option("--seed", mask.seed, "Random seed for --random");
    mask_cmd->add_option("--emit-spec", mask.emit_spec, "Write the applied spec as JSON");

    // train
    std::string train_config_path, train_out_dir = "run";
    TrainConfig tc;
    long tr_steps = 0;
    int tr_batch = 0, tr_threads = -1, tr_d_model = 0, tr_blocks = 0, tr_heads = 0;
    int tr_symbols = 0, tr_kernel = 0;
    long tr_ckpt_every = -1;
    double tr_lr = 0.0, tr_mask_fraction = 0.0, tr_grad_clip = -1.0;
    std::uint64_t tr_seed = 0;
    bool tr_share = false;
    std::vector<std::string> tr_mods;
    auto* train_cmd = app.add_subcommand("train", "Streaming self-supervised training");
    train_cmd->add_option("--config", train_config_path, "JSON config file");
    train_cmd->add_option("--out-dir", train_out_dir, "Checkpoint/curve directory");
    train_cmd->add_option("--steps", tr_steps, "Training steps");
    train_cmd->add_option("--batch-size", tr_batch, "Waveforms per batch");
    train_cmd->add_option("--lr", tr_lr, "Adam learning rate");
    train_cmd->add_option("--seed", tr_seed, "Master seed");
    train_cmd->add_option("--mask-fraction", tr_mask_fraction, "Masked symbol fraction");
    train_cmd->add_option("--grad-clip", tr_grad_clip, "Global-norm gradient clip (0 = off)");
    train_cmd->add_option("--threads", tr_threads, "Worker threads (0 = auto)");
    train_cmd->add_option("--d-model", tr_d_model, "Embedding width");
    train_cmd->add_option("--blocks", tr_blocks, "Encoder blocks");
    train_cmd->add_option("--heads", tr_heads, "Attention heads");
    train_cmd->add_option("--proj-kernel", tr_kernel, "Input projection window (odd)");
    train_cmd->add_flag("--share-weights", tr_share, "Share weights across blocks");
    train_cmd->add_option("--mods", tr_mods, "Restrict modulations")->delimiter(',');
    train_cmd->add_option("--symbols", tr_symbols, "Symbols per waveform (K)");
    train_cmd->add_option("--checkpoint-every", tr_ckpt_every, "Checkpoint cadence (steps)");

    // eval
    EvalOptions ev;
    auto* eval_cmd = app.add_subcommand("eval", "Run an evaluation scenario");
    eval_cmd->add_option("--checkpoint", ev.checkpoint, "Trained checkpoint")->required();
    eval_cmd->add_option("--scenario", ev.scenario, "clean | impulsive")->required();
    eval_cmd->add_option("--seeds", ev.seeds, "Evaluation seeds")->delimiter(',');
    eval_cmd->add_option("--out", ev.out_path, "Report JSON path");
    eval_cmd->add_option("--csv", ev.csv_path, "Also write a flat CSV");
    eval_cmd->add_option("--threads", ev.threads, "Worker threads (0 = auto)");
    eval_cmd->add_option("--modulation", ev.modulation,
                         "Clean scenario: single modulation or 'mixed'");
    eval_cmd->add_option("--batches", ev.batches, "Clean scenario: batches per seed");
    eval_cmd->add_option("--batch-size", ev.batch_size, "Clean scenario: waveforms per batch");
    eval_cmd->add_option("--mask-fraction", ev.mask_fraction, "Clean scenario: mask fraction");
    eval_cmd->add_flag("--baseline", ev.baseline, "Also score the classical demodulator");
    eval_cmd->add_option("--gamma", ev.gamma, "Impulsive: Gaussian-to-impulsive ratio");
    eval_cmd->add_option("--snr-grid", ev.snr_grid, "Impulsive: SNR grid in dB")->delimiter(',');
    eval_cmd->add_option("--p-star", ev.p_star, "Impulsive: target symbol-hit rate");
    eval_cmd->add_option("--waveforms-per-snr", ev.waveforms_per_snr,
                         "Impulsive: waveforms per SNR point per seed");
    eval_cmd->add_option("--mods", ev.mods, "Dataset modulation set")->delimiter(',');
    eval_cmd->add_option("--symbols", ev.symbols, "Symbols per waveform (K)");
    eval_cmd->add_option("--sps", ev.sps, "Samples per symbol (L)");

    // report
    std::string report_in;
    auto* report_cmd = app.add_subcommand("report", "Render a report JSON as text");
    report_cmd->add_option("--in", report_in, "Report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        auto manifest_or = [&](const std::string& fallback) {
            return manifest_path.empty() ? fs::path(fallback) : fs::path(manifest_path);
        };
        if (*vocab_cmd) return cmd_vocab(vocab_out, manifest_or("vocab-manifest.json"));
        if (*gen_cmd) return cmd_gen(gen, manifest_path);
        if (*nc_cmd)
            return cmd_noise_calibrate(nc_p_star, nc_sps, nc_symbols, nc_delta,
                                       manifest_or("noise-calibrate-manifest.json"));
        if (*ns_cmd)
            return cmd_noise_stats(ns_a, ns_p_star, ns_sps, ns_symbols, ns_waveforms, ns_seed,
                                   ns_out, manifest_or("noise-stats-manifest.json"));
        if (*mask_cmd) return cmd_mask(mask, manifest_or(mask.out_path + ".manifest.json"));
        if (*train_cmd) {
            if (!train_config_path.empty()) {
                try {
                    tc = train_config_from_json(load_config_file(train_config_path));
                } catch (const nlohmann::json::exception& e) {
                    throw BadConfig("malformed config: " + std::string(e.what()));
                }
            }
            if (train_cmd->count("--steps")) tc.max_steps = tr_steps;
            if (train_cmd->count("--batch-size")) tc.batch_size = tr_batch;
            if (train_cmd->count("--lr")) tc.adam.learning_rate = tr_lr;
            if (train_cmd->count("--seed")) tc.seed = tr_seed;
            if (train_cmd->count("--mask-fraction")) tc.mask_fraction = tr_mask_fraction;
            if (train_cmd->count("--grad-clip")) tc.grad_clip_norm = tr_grad_clip;
            if (train_cmd->count("--threads")) tc.threads = tr_threads;
            if (train_cmd->count("--d-model")) tc.model.d_model = tr_d_model;
            if (train_cmd->count("--blocks")) tc.model.n_blocks = tr_blocks;
            if (train_cmd->count("--heads")) tc.model.n_heads = tr_heads;
            if (train_cmd->count("--proj-kernel")) tc.model.proj_kernel = tr_kernel;
            if (train_cmd->count("--share-weights")) tc.model.share_block_weights = tr_share;
            if (train_cmd->count("--symbols")) tc.dataset.symbols_per_waveform = tr_symbols;
            if (train_cmd->count("--checkpoint-every")) tc.checkpoint_every = tr_ckpt_every;
            if (!tr_mods.empty()) {
                tc.dataset.modulations.clear();
                for (const std::string& m : tr_mods)
                    tc.dataset.modulations.push_back(modulation_from_string(m));
            }
            return cmd_train(tc, train_out_dir, manifest_path);
        }
        if (*eval_cmd) return cmd_eval(ev, manifest_or(ev.out_path + ".manifest.json"));
        if (*report_cmd) return cmd_report(report_in);
    } catch (const MissingFile& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    } catch (const BadConfig& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
