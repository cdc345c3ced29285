#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gridsd/runner.hpp"

namespace {

int finish(const gridsd::ExecuteOutcome& outcome) {
    if (outcome.exit_code == gridsd::kExitOk) {
        std::cout << "artifacts: " << outcome.artifact_dir.string() << "\n";
    } else {
        std::cerr << "error: " << outcome.message << "\n";
    }
    return outcome.exit_code;
}

gridsd::RunConfig load(const std::string& config_path) {
    return gridsd::parse_config(config_path);
}

// "0..6" or "0,2,4"
std::vector<int> parse_depth_list(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        for (int n = lo; n <= hi; ++n) out.push_back(n);
        return out;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!tok.empty()) out.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"space-division feedback decoding: simulate, run, sweep, analyze"};
    app.require_subcommand(1);

    std::string config_path;
    std::string depth_spec;
    std::string run_dir;
    double gamma = -1.0;
    double delta = -1.0;

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
    simulate->add_option("--config", config_path, "config file")->required();

    auto* run = app.add_subcommand("run", "execute the configured training loop");
    run->add_option("--config", config_path, "config file")->required();

    auto* sweep = app.add_subcommand("sweep", "run every requested division depth");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--n", depth_spec, "depths, e.g. 0..6 or 0,2,4 (overrides sweep.depths)");

    auto* analyze = app.add_subcommand("analyze", "post-process a run directory");
    analyze->add_option("--run", run_dir, "run directory")->required();
    analyze->add_option("--gamma", gamma, "complexity weight for depth selection");
    analyze->add_option("--delta", delta, "boundary band in axis units");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed())
            return finish(gridsd::execute(gridsd::Command::Simulate, load(config_path)));
        if (run->parsed())
            return finish(gridsd::execute(gridsd::Command::Run, load(config_path)));
        if (sweep->parsed()) {
            gridsd::RunConfig config = load(config_path);
            if (!depth_spec.empty()) config.sweep_depths = parse_depth_list(depth_spec);
            return finish(gridsd::execute(gridsd::Command::Sweep, config));
        }
        if (analyze->parsed()) return finish(gridsd::analyze_run(run_dir, gamma, delta));
    } catch (const gridsd::ConfigError& e) {
        std::cerr << "config error:\n";
        for (const std::string& v : e.violations) std::cerr << "  - " << v << "\n";
        return gridsd::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return gridsd::kExitRunError;
    }
    return gridsd::kExitRunError;
}
