#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gridsd/grid.hpp"
#include "gridsd/pipeline.hpp"
#include "gridsd/synth.hpp"

namespace gridsd {

/// Config rejection carrying every violation found, each naming its key.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> problems);
    std::vector<std::string> violations;
};

enum class DecoderKind : std::uint8_t { Pca, Oracle };
enum class RunMode : std::uint8_t { Interaction, Self, Both };

struct OracleConfig {
    std::vector<int> reflect_axes;
    double noise_sd = 0.0;
};

struct SynthConfig {
    Eigen::Index samples = 1000;
    TrajectoryModel trajectory;  // bounds/seed filled from the run config
    TuningModel tuning;
    int channels = 16;
};

struct AnalysisConfig {
    double gamma = 0.01;
    double delta_frac = 0.02;  // boundary band as a fraction of axis width
    int ratemap_resolution = 32;
};

struct RunConfig {
    std::uint64_t seed = 0;
    SpaceBounds bounds;
    GridParams grid;
    DecoderKind decoder = DecoderKind::Pca;
    OracleConfig oracle;
    double ridge = 1e-6;
    RunMode mode = RunMode::Interaction;
    int epochs = 1;
    double split = 0.7;
    RefitMode refit = RefitMode::None;
    std::vector<int> sweep_depths;
    std::string dataset_csv;  // empty when data comes from synth
    bool has_synth = false;
    SynthConfig synth;
    std::string output_dir = "run";
    AnalysisConfig analysis;
};

/// Parse and fully validate a config file; throws ConfigError listing every
/// violation (unknown keys included) by key path.
RunConfig parse_config(const std::filesystem::path& path);

/// Parse from a JSON string (same validation).
RunConfig parse_config_text(const std::string& text);

/// Canonical JSON echo of a config; parsing it back reproduces the run.
std::string config_echo(const RunConfig& config);

LoopSettings loop_settings(const RunConfig& config);

}  // namespace gridsd
