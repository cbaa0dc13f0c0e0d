#include "msm/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace msm {

namespace {

// Explicit little-endian packing so the formats are identical on any host.
void put_bytes(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

void put_u16(std::string& out, std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                                static_cast<unsigned char>(v >> 8)};
    put_bytes(out, b, 2);
}

void put_u32(std::string& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    put_bytes(out, b, 4);
}

void put_f32(std::string& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(out, u);
}

void put_f64(std::string& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
    put_bytes(out, b, 8);
}

class Reader {
  public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    std::uint16_t u16() {
        need(2);
        const auto* b = bytes();
        pos_ += 2;
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    std::uint32_t u32() {
        need(4);
        const auto* b = bytes();
        pos_ += 4;
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    float f32() {
        const std::uint32_t u = u32();
        float v;
        std::memcpy(&v, &u, 4);
        return v;
    }
    double f64() {
        need(8);
        const auto* b = bytes();
        pos_ += 8;
        std::uint64_t u = 0;
        for (int i = 7; i >= 0; --i) u = (u << 8) | b[i];
        double v;
        std::memcpy(&v, &u, 8);
        return v;
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const { return pos_ == data_.size(); }

  private:
    const unsigned char* bytes() const {
        return reinterpret_cast<const unsigned char*>(data_.data()) + pos_;
    }
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw std::runtime_error("file truncated");
    }
    std::string data_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

constexpr std::uint32_t kWaveVersion = 1;
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void write_waveform(const std::filesystem::path& path, const Waveform& wave) {
    std::string out;
    out.reserve(40 + wave.i_samples.size() * 8 + wave.symbol_ids.size() * 2);
    out.append("MSMW");
    put_u32(out, kWaveVersion);
    put_u32(out, static_cast<std::uint32_t>(wave.num_symbols()));
    put_u32(out, static_cast<std::uint32_t>(wave.sps));
    put_u32(out, static_cast<std::uint32_t>(wave.num_samples()));
    put_u32(out, static_cast<std::uint32_t>(wave.meta.modulation));
    put_f64(out, wave.meta.beta);
    put_u32(out, static_cast<std::uint32_t>(wave.meta.span));
    put_f64(out, wave.meta.gain);
    for (double x : wave.i_samples) put_f32(out, static_cast<float>(x));
    for (double x : wave.q_samples) put_f32(out, static_cast<float>(x));
    for (std::uint16_t id : wave.symbol_ids) put_u16(out, id);
    write_file(path, out);
}

Waveform read_waveform(const std::filesystem::path& path) {
    Reader r(read_file(path));
    if (r.str(4) != "MSMW") throw std::runtime_error(path.string() + ": not a waveform file");
    if (r.u32() != kWaveVersion)
        throw std::runtime_error(path.string() + ": unsupported waveform version");
    Waveform w;
    const std::uint32_t k = r.u32();
    w.sps = static_cast<int>(r.u32());
    const std::uint32_t n = r.u32();
    if (n != k * static_cast<std::uint32_t>(w.sps))
        throw std::runtime_error(path.string() + ": inconsistent sample count");
    const std::uint32_t mod = r.u32();
    if (mod >= kNumModulations)
        throw std::runtime_error(path.string() + ": bad modulation tag");
    w.meta.modulation = static_cast<Modulation>(mod);
    w.meta.beta = r.f64();
    w.meta.span = static_cast<int>(r.u32());
    w.meta.gain = r.f64();
    w.i_samples.resize(n);
    w.q_samples.resize(n);
    w.symbol_ids.resize(k);
    for (auto& x : w.i_samples) x = r.f32();
    for (auto& x : w.q_samples) x = r.f32();
    for (auto& id : w.symbol_ids) id = r.u16();
    if (!r.at_end()) throw std::runtime_error(path.string() + ": trailing bytes");
    return w;
}

void write_waveform_json(const std::filesystem::path& path, const Waveform& wave) {
    nlohmann::json j;
    j["modulation"] = to_string(wave.meta.modulation);
    j["beta"] = wave.meta.beta;
    j["span"] = wave.meta.span;
    j["gain"] = wave.meta.gain;
    j["sps"] = wave.sps;
    j["symbol_ids"] = wave.symbol_ids;
    j["i"] = wave.i_samples;
    j["q"] = wave.q_samples;
    write_json_file(path, j);
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params) {
    std::string out;
    out.append("MSMC");
    put_u32(out, kCheckpointVersion);
    const std::string cfg = model_config_to_json(params.config).dump();
    put_u32(out, static_cast<std::uint32_t>(cfg.size()));
    out.append(cfg);

    auto& mutable_params = const_cast<ModelParams&>(params);  // views are read here
    const auto views = tensor_views(mutable_params);
    put_u32(out, static_cast<std::uint32_t>(views.size()));
    for (const TensorView& t : views) {
        put_u16(out, static_cast<std::uint16_t>(t.name.size()));
        out.append(t.name);
        put_u32(out, static_cast<std::uint32_t>(t.rows));
        put_u32(out, static_cast<std::uint32_t>(t.cols));
        for (Eigen::Index i = 0; i < t.size(); ++i) put_f64(out, t.data[i]);
    }
    write_file(path, out);
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    Reader r(read_file(path));
    if (r.str(4) != "MSMC") throw std::runtime_error(path.string() + ": not a checkpoint file");
    if (r.u32() != kCheckpointVersion)
        throw std::runtime_error(path.string() + ": unsupported checkpoint version");
    const std::uint32_t cfg_len = r.u32();
    const ModelConfig config = model_config_from_json(nlohmann::json::parse(r.str(cfg_len)));

    ModelParams params = make_zero_params(config);
    auto views = tensor_views(params);
    const std::uint32_t count = r.u32();
    if (count != views.size())
        throw std::runtime_error(path.string() + ": tensor count does not match config");
    for (TensorView& t : views) {
        const std::uint16_t name_len = r.u16();
        const std::string name = r.str(name_len);
        if (name != t.name)
            throw std::runtime_error(path.string() + ": unexpected tensor " + name +
                                     " (wanted " + t.name + ")");
        const auto rows = static_cast<Eigen::Index>(r.u32());
        const auto cols = static_cast<Eigen::Index>(r.u32());
        if (rows != t.rows || cols != t.cols)
            throw std::runtime_error(path.string() + ": shape mismatch for " + name);
        for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] = r.f64();
    }
    if (!r.at_end()) throw std::runtime_error(path.string() + ": trailing bytes");
    return params;
}

nlohmann::json model_config_to_json(const ModelConfig& c) {
    return nlohmann::json{{"d_model", c.d_model},
                          {"n_blocks", c.n_blocks},
                          {"n_heads", c.n_heads},
                          {"d_ff", c.d_ff},
                          {"vocab_size", c.vocab_size},
                          {"max_len", c.max_len},
                          {"proj_kernel", c.proj_kernel},
                          {"share_block_weights", c.share_block_weights}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.d_model = j.value("d_model", c.d_model);
    c.n_blocks = j.value("n_blocks", c.n_blocks);
    c.n_heads = j.value("n_heads", c.n_heads);
    c.d_ff = j.value("d_ff", c.d_ff);
    c.vocab_size = j.value("vocab_size", c.vocab_size);
    c.max_len = j.value("max_len", c.max_len);
    c.proj_kernel = j.value("proj_kernel", c.proj_kernel);
    c.share_block_weights = j.value("share_block_weights", c.share_block_weights);
    c.validate();
    return c;
}

nlohmann::json dataset_config_to_json(const DatasetConfig& c) {
    std::vector<std::string> mods;
    mods.reserve(c.modulations.size());
    for (Modulation m : c.modulations) mods.push_back(to_string(m));
    return nlohmann::json{{"modulations", mods},
                          {"roll_offs", c.roll_offs},
                          {"spans", c.spans},
                          {"symbols_per_waveform", c.symbols_per_waveform},
                          {"sps", c.sps}};
}

DatasetConfig dataset_config_from_json(const nlohmann::json& j) {
    DatasetConfig c;
    if (j.contains("modulations")) {
        c.modulations.clear();
        for (const auto& name : j.at("modulations"))
            c.modulations.push_back(modulation_from_string(name.get<std::string>()));
    }
    if (j.contains("roll_offs")) c.roll_offs = j.at("roll_offs").get<std::vector<double>>();
    if (j.contains("spans")) c.spans = j.at("spans").get<std::vector<int>>();
    c.symbols_per_waveform = j.value("symbols_per_waveform", c.symbols_per_waveform);
    c.sps = j.value("sps", c.sps);
    return c;
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
    return nlohmann::json{{"model", model_config_to_json(c.model)},
                          {"dataset", dataset_config_to_json(c.dataset)},
                          {"learning_rate", c.adam.learning_rate},
                          {"adam_beta1", c.adam.beta1},
                          {"adam_beta2", c.adam.beta2},
                          {"adam_epsilon", c.adam.epsilon},
                          {"batch_size", c.batch_size},
                          {"max_steps", c.max_steps},
                          {"seed", c.seed},
                          {"mask_fraction", c.mask_fraction},
                          {"grad_clip_norm", c.grad_clip_norm},
                          {"checkpoint_every", c.checkpoint_every},
                          {"threads", c.threads}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig c;
    if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
    if (j.contains("dataset")) c.dataset = dataset_config_from_json(j.at("dataset"));
    c.adam.learning_rate = j.value("learning_rate", c.adam.learning_rate);
    c.adam.beta1 = j.value("adam_beta1", c.adam.beta1);
    c.adam.beta2 = j.value("adam_beta2", c.adam.beta2);
    c.adam.epsilon = j.value("adam_epsilon", c.adam.epsilon);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.seed = j.value("seed", c.seed);
    c.mask_fraction = j.value("mask_fraction", c.mask_fraction);
    c.grad_clip_norm = j.value("grad_clip_norm", c.grad_clip_norm);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    c.threads = j.value("threads", c.threads);
    return c;
}

nlohmann::json mask_spec_to_json(const MaskSpec& spec) {
    return nlohmann::json{{"sps", spec.sps}, {"masked_symbols", spec.masked_symbols}};
}

MaskSpec mask_spec_from_json(const nlohmann::json& j) {
    MaskSpec spec;
    spec.sps = j.at("sps").get<int>();
    spec.masked_symbols = j.at("masked_symbols").get<std::vector<int>>();
    return spec;
}

namespace {
nlohmann::json row_to_json(const EvalRow& r) {
    nlohmann::json j{{"scenario", r.scenario}, {"modulation", r.modulation},
                     {"gamma", r.gamma},       {"seed", r.seed},
                     {"averaged", r.averaged}, {"targets", r.targets},
                     {"errors", r.errors},     {"ser", r.ser}};
    if (!std::isnan(r.snr_db)) j["snr_db"] = r.snr_db;
    if (!std::isnan(r.baseline_ser)) j["baseline_ser"] = r.baseline_ser;
    return j;
}

EvalRow row_from_json(const nlohmann::json& j) {
    EvalRow r;
    r.scenario = j.at("scenario").get<std::string>();
    r.modulation = j.at("modulation").get<std::string>();
    r.gamma = j.value("gamma", 0.0);
    r.snr_db = j.value("snr_db", std::numeric_limits<double>::quiet_NaN());
    r.seed = j.value("seed", std::uint64_t{0});
    r.averaged = j.value("averaged", false);
    r.targets = j.at("targets").get<long>();
    r.errors = j.at("errors").get<long>();
    r.ser = j.at("ser").get<double>();
    r.baseline_ser = j.value("baseline_ser", std::numeric_limits<double>::quiet_NaN());
    return r;
}
}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const EvalRow& r : report.rows) rows.push_back(row_to_json(r));
    nlohmann::json j{{"scenario", report.scenario},
                     {"seeds", report.seeds},
                     {"total_targets", report.total_targets},
                     {"rows", rows}};
    if (report.waveforms > 0) {
        j["waveforms"] = report.waveforms;
        j["skipped_waveforms"] = report.skipped_waveforms;
        j["mean_hit_rate"] = report.mean_hit_rate;
        j["hit_rate_coverage"] = report.hit_rate_coverage;
        j["hit_rate_interval"] = {report.interval_lo, report.interval_hi};
    }
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport report;
    report.scenario = j.at("scenario").get<std::string>();
    report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    report.total_targets = j.at("total_targets").get<long>();
    for (const auto& row : j.at("rows")) report.rows.push_back(row_from_json(row));
    if (j.contains("waveforms")) {
        report.waveforms = j.at("waveforms").get<long>();
        report.skipped_waveforms = j.at("skipped_waveforms").get<long>();
        report.mean_hit_rate = j.at("mean_hit_rate").get<double>();
        report.hit_rate_coverage = j.at("hit_rate_coverage").get<double>();
        report.interval_lo = j.at("hit_rate_interval")[0].get<double>();
        report.interval_hi = j.at("hit_rate_interval")[1].get<double>();
    }
    return report;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "scenario,modulation,gamma,snr_db,seed,averaged,targets,errors,ser,baseline_ser\n";
    out.precision(10);
    for (const EvalRow& r : report.rows) {
        out << r.scenario << ',' << r.modulation << ',' << r.gamma << ',';
        if (!std::isnan(r.snr_db)) out << r.snr_db;
        out << ',' << r.seed << ',' << (r.averaged ? 1 : 0) << ',' << r.targets << ','
            << r.errors << ',' << r.ser << ',';
        if (!std::isnan(r.baseline_ser)) out << r.baseline_ser;
        out << '\n';
    }
    if (!out) throw std::runtime_error("short write to " + path.string());
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    nlohmann::json j{{"subcommand", manifest.subcommand},
                     {"config", manifest.config},
                     {"seeds", manifest.seeds},
                     {"artifact_version", kArtifactVersion},
                     {"outputs", manifest.outputs},
                     {"duration_seconds", manifest.duration_seconds}};
    write_json_file(path, j);
}

void write_loss_curve_csv(const std::filesystem::path& path,
                          const std::vector<StepStats>& curve) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "step,loss,accuracy\n";
    out.precision(12);
    for (const StepStats& s : curve)
        out << s.step << ',' << s.loss << ',' << s.accuracy << '\n';
    if (!out) throw std::runtime_error("short write to " + path.string());
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return nlohmann::json::parse(in);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("short write to " + path.string());
}

}  // namespace msm
