#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "msm/eval.hpp"
#include "msm/masking.hpp"
#include "msm/model.hpp"
#include "msm/train.hpp"
#include "msm/waveform.hpp"

namespace msm {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Waveform container, little-endian: magic "MSMW", u32 version, u32 K, u32 L,
// u32 N, u32 modulation tag, f64 beta, u32 span, f64 gain, then N float32 I
// samples, N float32 Q samples, K uint16 symbol IDs.
void write_waveform(const std::filesystem::path& path, const Waveform& wave);
Waveform read_waveform(const std::filesystem::path& path);

// Human-readable sidecar with the same content.
void write_waveform_json(const std::filesystem::path& path, const Waveform& wave);

// Checkpoint, little-endian: magic "MSMC", u32 version, length-prefixed
// ModelConfig JSON, u32 tensor count, then per tensor a length-prefixed name,
// u32 rows, u32 cols and rows*cols float64 values in column-major order.
// Loading rebuilds the structure from the config and validates every name
// and shape against it.
void save_checkpoint(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_checkpoint(const std::filesystem::path& path);

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json dataset_config_to_json(const DatasetConfig& config);
DatasetConfig dataset_config_from_json(const nlohmann::json& j);

nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json mask_spec_to_json(const MaskSpec& spec);
MaskSpec mask_spec_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);

// Per-run provenance record; one is written by every CLI run.
struct RunManifest {
    std::string subcommand;
    nlohmann::json config;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;
};
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

void write_loss_curve_csv(const std::filesystem::path& path,
                          const std::vector<StepStats>& curve);

nlohmann::json load_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace msm
