#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "gridsd/artifacts.hpp"

namespace gridsd {

enum class Command : std::uint8_t { Simulate, Run, Sweep, Analyze };

/// Exit codes of the command surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRunError = 1;
inline constexpr int kExitConfigError = 2;

/// Resolve the run directory: `$GRIDSD_OUTPUT_ROOT/<output_dir>` when the
/// environment variable is set, `<output_dir>` otherwise.
std::filesystem::path resolve_output_dir(const std::string& output_dir);

/// Build the dataset a config describes (CSV load or synthesis).
Dataset load_or_synthesize(const RunConfig& config);

/// Fresh exploration decoder per the config. Oracle decoders are created
/// pre-fitted on the training split so exploration can decode it.
std::unique_ptr<ExplorationDecoder> make_decoder(const RunConfig& config, const Dataset& data);

struct ExecuteOutcome {
    int exit_code = kExitOk;
    std::filesystem::path artifact_dir;
    std::string message;  // error description when exit_code != 0
};

/// Run one command against a parsed config. Artifacts are written atomically;
/// nothing is left behind on failure.
ExecuteOutcome execute(Command command, const RunConfig& config);

/// Analyze an existing run directory: boundary affinity from events.csv and
/// predictions.csv, plus depth selection when sweep.csv is present. Writes
/// analysis.json (and selected_n.json) into the directory and refreshes the
/// manifest. Negative gamma/delta mean "use the config echo's values".
ExecuteOutcome analyze_run(const std::filesystem::path& run_dir, double gamma, double delta);

}  // namespace gridsd
