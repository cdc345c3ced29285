#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "gridsd/analysis.hpp"
#include "gridsd/config.hpp"
#include "gridsd/dataset.hpp"

namespace gridsd {

/// Dataset CSV: header `t,pos_0..pos_{d-1},f_0..f_{nT-1}`, one row per
/// sample, `.` decimal, LF endings. Values print with 17 significant digits
/// so a round trip is exact.
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset_csv(const std::filesystem::path& path);

/// 64-bit FNV-1a over a file's bytes, hex encoded. Integrity marker for the
/// manifest, not a cryptographic digest.
std::string file_checksum(const std::filesystem::path& path);

/// Checksum every regular file in a directory (manifest.json excluded) and
/// write manifest.json last.
void write_manifest(const std::filesystem::path& dir);
std::map<std::string, std::string> read_manifest(const std::filesystem::path& dir);

/// Everything a completed run leaves behind: metrics.json, events.csv,
/// predictions.csv, ratemap.csv, config.json and the manifest.
struct RunArtifacts {
    const RunConfig& config;
    const Dataset& data;
    std::vector<const RunResult*> phases;
};

/// Write the run's artifact set into `dir` atomically: files land in a
/// temporary sibling which is renamed over `dir` only after the manifest is
/// complete. An existing `dir` is replaced.
void export_artifacts(const RunArtifacts& artifacts, const std::filesystem::path& dir);

void write_sweep_csv(const SweepTable& table, const std::filesystem::path& path);
SweepTable read_sweep_csv(const std::filesystem::path& path);

/// Readers for the analyze command.
std::vector<CorrectionEvent> read_events_csv(const std::filesystem::path& path);
Eigen::MatrixXd read_train_positions_csv(const std::filesystem::path& path);

}  // namespace gridsd
