#include "gridsd/runner.hpp"

#include <cstdlib>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gridsd/synth.hpp"

namespace gridsd {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

fs::path resolve_output_dir(const std::string& output_dir) {
    if (const char* root = std::getenv("GRIDSD_OUTPUT_ROOT"); root != nullptr && *root != '\0')
        return fs::path(root) / output_dir;
    return fs::path(output_dir);
}

Dataset load_or_synthesize(const RunConfig& config) {
    if (!config.dataset_csv.empty()) {
        Dataset data = read_dataset_csv(config.dataset_csv);
        data.validate(config.bounds);
        return data;
    }
    if (!config.has_synth) throw ConfigError({"data: provide either data.csv or data.synth"});

    Dataset data;
    data.labels = gen_trajectory(config.synth.trajectory);
    TuningModel tuning = config.synth.tuning;
    tuning.preferred = lattice_preferred(config.bounds, config.synth.channels, config.seed);
    data.neural = gen_neural(data.labels, tuning, config.seed);
    return data;
}

std::unique_ptr<ExplorationDecoder> make_decoder(const RunConfig& config, const Dataset& data) {
    if (config.decoder == DecoderKind::Pca)
        return std::make_unique<PcaDecoder>(config.bounds, config.seed);

    const SplitIndex split = make_split(data.size(), config.split);
    auto oracle = std::make_unique<OracleDecoder>(data.labels.topRows(split.train_count),
                                                  config.bounds, config.oracle.reflect_axes,
                                                  config.oracle.noise_sd, config.seed);
    oracle->fit(data.neural.topRows(split.train_count));
    return oracle;
}

namespace {

// Populate a temporary sibling of `dir`, then swap it into place.
class StagedDir {
public:
    explicit StagedDir(const fs::path& target) : target_(target) {
        const fs::path parent = target.parent_path().empty() ? fs::path(".") : target.parent_path();
        fs::create_directories(parent);
        tmp_ = parent / (target.filename().string() + ".tmp-staged");
        fs::remove_all(tmp_);
        fs::create_directories(tmp_);
    }
    ~StagedDir() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(tmp_, ec);
        }
    }
    const fs::path& path() const { return tmp_; }
    void commit() {
        write_manifest(tmp_);
        fs::remove_all(target_);
        fs::rename(tmp_, target_);
        committed_ = true;
    }

private:
    fs::path target_;
    fs::path tmp_;
    bool committed_ = false;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ExecuteOutcome do_simulate(const RunConfig& config) {
    if (!config.has_synth)
        return {kExitConfigError, {}, "simulate needs a data.synth section"};
    const Dataset data = load_or_synthesize(config);
    const fs::path dir = resolve_output_dir(config.output_dir);
    StagedDir staged(dir);
    write_dataset_csv(data, staged.path() / "dataset.csv");
    write_text(staged.path() / "config.json", config_echo(config));
    staged.commit();
    return {kExitOk, dir, ""};
}

ExecuteOutcome do_run(const RunConfig& config) {
    const Dataset data = load_or_synthesize(config);
    auto decoder = make_decoder(config, data);
    const LoopSettings settings = loop_settings(config);

    std::vector<RunResult> results;
    if (config.mode == RunMode::Interaction) {
        results.push_back(run_interaction(settings, data, *decoder));
    } else if (config.mode == RunMode::Self) {
        LoopSettings bootstrap = settings;
        bootstrap.epochs = 1;
        results.push_back(run_interaction(bootstrap, data, *decoder));
        results.push_back(run_self_reinforcement(settings, data, *decoder, results.front().model));
    } else {
        results.push_back(run_interaction(settings, data, *decoder));
        results.push_back(run_self_reinforcement(settings, data, *decoder, results.front().model));
    }

    RunArtifacts artifacts{config, data, {}};
    for (const RunResult& r : results) artifacts.phases.push_back(&r);
    const fs::path dir = resolve_output_dir(config.output_dir);
    export_artifacts(artifacts, dir);
    return {kExitOk, dir, ""};
}

ExecuteOutcome do_sweep(const RunConfig& config) {
    if (config.sweep_depths.empty())
        return {kExitConfigError, {}, "sweep needs a sweep.depths list"};
    const Dataset data = load_or_synthesize(config);
    const LoopSettings settings = loop_settings(config);
    const SweepTable table = sweep_n(settings, data,
                                     [&] { return make_decoder(config, data); },
                                     config.sweep_depths);

    const fs::path dir = resolve_output_dir(config.output_dir);
    StagedDir staged(dir);
    write_sweep_csv(table, staged.path() / "sweep.csv");
    write_text(staged.path() / "config.json", config_echo(config));
    staged.commit();

    for (const SweepRow& row : table.rows)
        if (!row.ok()) return {kExitRunError, dir, "sweep row depth " + std::to_string(row.depth) + " failed: " + row.error};
    return {kExitOk, dir, ""};
}

}  // namespace

ExecuteOutcome execute(Command command, const RunConfig& config) {
    try {
        switch (command) {
            case Command::Simulate: return do_simulate(config);
            case Command::Run: return do_run(config);
            case Command::Sweep: return do_sweep(config);
            case Command::Analyze:
                return analyze_run(resolve_output_dir(config.output_dir), config.analysis.gamma,
                                   -1.0);
        }
        return {kExitRunError, {}, "unknown command"};
    } catch (const ConfigError& e) {
        return {kExitConfigError, {}, e.what()};
    } catch (const std::exception& e) {
        return {kExitRunError, {}, e.what()};
    }
}

ExecuteOutcome analyze_run(const fs::path& run_dir, double gamma, double delta) {
    try {
        if (!fs::exists(run_dir / "config.json"))
            return {kExitRunError, run_dir, "not a run directory (config.json missing)"};
        const RunConfig config = parse_config(run_dir / "config.json");
        const double use_gamma = gamma >= 0.0 ? gamma : config.analysis.gamma;

        json analysis;
        bool wrote_any = false;

        if (fs::exists(run_dir / "events.csv") && fs::exists(run_dir / "predictions.csv")) {
            const auto events = read_events_csv(run_dir / "events.csv");
            const Eigen::MatrixXd samples = read_train_positions_csv(run_dir / "predictions.csv");
            const double use_delta =
                delta > 0.0 ? delta : config.analysis.delta_frac * config.bounds.min_width();
            const BoundaryAffinity ba =
                boundary_affinity(events, samples, config.bounds, config.grid, use_delta);
            json j;
            j["delta"] = use_delta;
            j["events"] = static_cast<std::int64_t>(events.size());
            j["event_fraction"] = ba.event_fraction;
            j["sample_fraction"] = ba.sample_fraction;
            if (ba.ratio.has_value())
                j["ratio"] = *ba.ratio;
            else
                j["ratio"] = nullptr;  // undefined: no mass near the lines
            analysis["boundary_affinity"] = j;
            wrote_any = true;
        }

        if (fs::exists(run_dir / "sweep.csv")) {
            const SweepTable table = read_sweep_csv(run_dir / "sweep.csv");
            const int selected = select_n(table, use_gamma);
            json sel;
            sel["gamma"] = use_gamma;
            sel["selected_n"] = selected;
            json scores = json::array();
            for (const SweepRow& row : table.rows)
                if (row.ok())
                    scores.push_back(json{{"n", row.depth},
                                          {"score", -row.test_rmse - use_gamma * table.dim * row.depth},
                                          {"test_rmse", row.test_rmse}});
            sel["scores"] = scores;
            write_text(run_dir / "selected_n.json", sel.dump(2) + "\n");
            analysis["selected_n"] = selected;
            wrote_any = true;
        }

        if (!wrote_any)
            return {kExitRunError, run_dir, "nothing to analyze (no events.csv or sweep.csv)"};

        write_text(run_dir / "analysis.json", analysis.dump(2) + "\n");
        write_manifest(run_dir);
        return {kExitOk, run_dir, ""};
    } catch (const ConfigError& e) {
        return {kExitConfigError, run_dir, e.what()};
    } catch (const std::exception& e) {
        return {kExitRunError, run_dir, e.what()};
    }
}

}  // namespace gridsd
