#include "gridsd/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridsd {

using json = nlohmann::ordered_json;

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::ostringstream oss;
    for (std::size_t i = 0; i < parts.size(); ++i) oss << (i ? "; " : "") << parts[i];
    return oss.str();
}

class Checker {
public:
    std::vector<std::string> problems;

    void fail(const std::string& key, const std::string& what) { problems.push_back(key + ": " + what); }

    void known_keys(const json& node, const std::string& prefix,
                    std::initializer_list<const char*> keys) {
        if (!node.is_object()) return;
        for (const auto& [key, value] : node.items()) {
            bool ok = false;
            for (const char* k : keys)
                if (key == k) ok = true;
            if (!ok) fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
        }
    }

    double number(const json& node, const std::string& key, double fallback, bool* present = nullptr) {
        if (!node.contains(key)) {
            if (present) *present = false;
            return fallback;
        }
        if (present) *present = true;
        if (!node[key].is_number()) {
            fail(key, "expected a number");
            return fallback;
        }
        return node[key].get<double>();
    }

    std::string text(const json& node, const std::string& key, const std::string& fallback) {
        if (!node.contains(key)) return fallback;
        if (!node[key].is_string()) {
            fail(key, "expected a string");
            return fallback;
        }
        return node[key].get<std::string>();
    }

    std::vector<double> numbers(const json& node, const std::string& key) {
        std::vector<double> out;
        if (!node.contains(key)) return out;
        if (!node[key].is_array()) {
            fail(key, "expected an array of numbers");
            return out;
        }
        for (const auto& v : node[key]) {
            if (!v.is_number()) {
                fail(key, "expected an array of numbers");
                return {};
            }
            out.push_back(v.get<double>());
        }
        return out;
    }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error("invalid config: " + join(problems)), violations(std::move(problems)) {}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"config file not readable: " + path.string()});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    if (!root.is_object()) throw ConfigError({"top level must be an object"});

    Checker c;
    RunConfig cfg;

    c.known_keys(root, "",
                 {"seed", "bounds", "grid", "decoder", "exploitation", "run", "sweep", "data",
                  "output_dir", "analysis"});

    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned() && !root["seed"].is_number_integer())
            c.fail("seed", "expected a non-negative integer");
        else
            cfg.seed = root["seed"].get<std::uint64_t>();
    }

    // bounds
    if (!root.contains("bounds") || !root["bounds"].is_object()) {
        c.fail("bounds", "required object with min/max arrays");
    } else {
        const json& b = root["bounds"];
        c.known_keys(b, "bounds", {"min", "max"});
        const auto lo = c.numbers(b, "min");
        const auto hi = c.numbers(b, "max");
        if (lo.empty() || hi.empty() || lo.size() != hi.size()) {
            c.fail("bounds", "min and max must be equal-length non-empty arrays");
        } else {
            for (std::size_t a = 0; a < lo.size(); ++a) {
                cfg.bounds.axes.push_back({lo[a], hi[a]});
                if (!(lo[a] < hi[a]))
                    c.fail("bounds.min/max[" + std::to_string(a) + "]", "min must be below max");
            }
        }
    }
    const int d = cfg.bounds.dim();

    // grid
    if (root.contains("grid")) {
        const json& g = root["grid"];
        if (!g.is_object()) {
            c.fail("grid", "expected an object");
        } else {
            c.known_keys(g, "grid",
                         {"depth", "center_scale", "flip_scale", "band", "deflect_x", "deflect_y",
                          "band_policy"});
            const double depth = c.number(g, "depth", 0.0);
            if (depth < 0.0 || depth != std::floor(depth))
                c.fail("grid.depth", "must be a non-negative integer");
            else
                cfg.grid.depth = static_cast<int>(depth);
            cfg.grid.center_scale = c.numbers(g, "center_scale");
            cfg.grid.flip_scale = c.numbers(g, "flip_scale");
            cfg.grid.band = c.number(g, "band", 0.0);
            cfg.grid.deflect_x = c.number(g, "deflect_x", 0.0);
            cfg.grid.deflect_y = c.number(g, "deflect_y", 0.0);
            const std::string policy = c.text(g, "band_policy", "dropout");
            if (policy == "dropout")
                cfg.grid.band_policy = BandPolicy::Dropout;
            else if (policy == "fallback")
                cfg.grid.band_policy = BandPolicy::FallbackToInteraction;
            else
                c.fail("grid.band_policy", "must be \"dropout\" or \"fallback\"");
        }
    }
    if (cfg.grid.center_scale.empty() && d > 0) cfg.grid.center_scale.assign(static_cast<std::size_t>(d), 1.0);
    if (cfg.grid.flip_scale.empty() && d > 0) cfg.grid.flip_scale.assign(static_cast<std::size_t>(d), 1.0);

    // decoder
    if (root.contains("decoder")) {
        const json& dec = root["decoder"];
        if (!dec.is_object()) {
            c.fail("decoder", "expected an object");
        } else {
            c.known_keys(dec, "decoder", {"kind", "reflect_axes", "noise_sd"});
            const std::string kind = c.text(dec, "kind", "pca");
            if (kind == "pca")
                cfg.decoder = DecoderKind::Pca;
            else if (kind == "oracle")
                cfg.decoder = DecoderKind::Oracle;
            else
                c.fail("decoder.kind", "must be \"pca\" or \"oracle\"");
            for (double a : c.numbers(dec, "reflect_axes")) {
                if (a != std::floor(a) || a < 0 || (d > 0 && a >= d))
                    c.fail("decoder.reflect_axes", "axis indices must be integers in [0, dim)");
                else
                    cfg.oracle.reflect_axes.push_back(static_cast<int>(a));
            }
            cfg.oracle.noise_sd = c.number(dec, "noise_sd", 0.0);
            if (cfg.oracle.noise_sd < 0.0) c.fail("decoder.noise_sd", "must be >= 0");
        }
    }

    // exploitation
    if (root.contains("exploitation")) {
        const json& e = root["exploitation"];
        c.known_keys(e, "exploitation", {"ridge"});
        cfg.ridge = c.number(e, "ridge", 1e-6);
        if (cfg.ridge < 0.0) c.fail("exploitation.ridge", "must be >= 0");
    }

    // run
    if (root.contains("run")) {
        const json& r = root["run"];
        c.known_keys(r, "run", {"mode", "epochs", "split", "refit"});
        const std::string mode = c.text(r, "mode", "interaction");
        if (mode == "interaction")
            cfg.mode = RunMode::Interaction;
        else if (mode == "self")
            cfg.mode = RunMode::Self;
        else if (mode == "both")
            cfg.mode = RunMode::Both;
        else
            c.fail("run.mode", "must be \"interaction\", \"self\" or \"both\"");
        const double epochs = c.number(r, "epochs", 1.0);
        if (epochs < 1.0 || epochs != std::floor(epochs))
            c.fail("run.epochs", "must be a positive integer");
        else
            cfg.epochs = static_cast<int>(epochs);
        cfg.split = c.number(r, "split", 0.7);
        if (!(cfg.split > 0.0 && cfg.split < 1.0)) c.fail("run.split", "must lie in (0, 1)");
        const std::string refit = c.text(r, "refit", "none");
        if (refit == "none")
            cfg.refit = RefitMode::None;
        else if (refit == "refit")
            cfg.refit = RefitMode::Refit;
        else
            c.fail("run.refit", "must be \"none\" or \"refit\"");
    }

    // sweep
    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        c.known_keys(s, "sweep", {"depths"});
        for (double v : c.numbers(s, "depths")) {
            if (v < 0 || v != std::floor(v))
                c.fail("sweep.depths", "depths must be non-negative integers");
            else
                cfg.sweep_depths.push_back(static_cast<int>(v));
        }
    }

    // data
    if (root.contains("data")) {
        const json& data = root["data"];
        c.known_keys(data, "data", {"csv", "synth"});
        cfg.dataset_csv = c.text(data, "csv", "");
        if (data.contains("synth")) {
            const json& sy = data["synth"];
            c.known_keys(sy, "data.synth", {"samples", "trajectory", "tuning"});
            cfg.has_synth = true;
            const double k = c.number(sy, "samples", 1000.0);
            if (k < 2 || k != std::floor(k))
                c.fail("data.synth.samples", "must be an integer >= 2");
            else
                cfg.synth.samples = static_cast<Eigen::Index>(k);

            if (sy.contains("trajectory")) {
                const json& t = sy["trajectory"];
                c.known_keys(t, "data.synth.trajectory",
                             {"kind", "step_sd", "smoothing", "frequencies", "phases"});
                const std::string kind = c.text(t, "kind", "walk");
                if (kind == "walk") {
                    SmoothedRandomWalk w;
                    w.step_sd = c.number(t, "step_sd", 0.3);
                    w.smoothing = c.number(t, "smoothing", 0.7);
                    if (w.step_sd < 0.0) c.fail("data.synth.trajectory.step_sd", "must be >= 0");
                    if (w.smoothing < 0.0 || w.smoothing >= 1.0)
                        c.fail("data.synth.trajectory.smoothing", "must lie in [0, 1)");
                    cfg.synth.trajectory.kind = w;
                } else if (kind == "lissajous") {
                    Lissajous l;
                    l.frequencies = c.numbers(t, "frequencies");
                    l.phases = c.numbers(t, "phases");
                    if (d > 0 && static_cast<int>(l.frequencies.size()) != d)
                        c.fail("data.synth.trajectory.frequencies", "need one frequency per axis");
                    cfg.synth.trajectory.kind = l;
                } else {
                    c.fail("data.synth.trajectory.kind", "must be \"walk\" or \"lissajous\"");
                }
            }
            if (sy.contains("tuning")) {
                const json& t = sy["tuning"];
                c.known_keys(t, "data.synth.tuning",
                             {"channels", "history", "gain", "baseline", "noise_sd", "kernel",
                              "kernel_width"});
                const double ch = c.number(t, "channels", 16.0);
                if (ch < 1 || ch != std::floor(ch))
                    c.fail("data.synth.tuning.channels", "must be a positive integer");
                else
                    cfg.synth.channels = static_cast<int>(ch);
                const double hist = c.number(t, "history", 1.0);
                if (hist < 1 || hist != std::floor(hist))
                    c.fail("data.synth.tuning.history", "must be a positive integer");
                else
                    cfg.synth.tuning.history = static_cast<int>(hist);
                cfg.synth.tuning.gain = c.number(t, "gain", 1.0);
                cfg.synth.tuning.baseline = c.number(t, "baseline", 0.0);
                cfg.synth.tuning.noise_sd = c.number(t, "noise_sd", 0.0);
                if (cfg.synth.tuning.noise_sd < 0.0)
                    c.fail("data.synth.tuning.noise_sd", "must be >= 0");
                const std::string kernel = c.text(t, "kernel", "gaussian");
                if (kernel == "linear")
                    cfg.synth.tuning.kernel = TuningModel::Kernel::Linear;
                else if (kernel == "gaussian")
                    cfg.synth.tuning.kernel = TuningModel::Kernel::Gaussian;
                else
                    c.fail("data.synth.tuning.kernel", "must be \"linear\" or \"gaussian\"");
                cfg.synth.tuning.kernel_width = c.number(t, "kernel_width", 1.0);
                if (cfg.synth.tuning.kernel_width <= 0.0)
                    c.fail("data.synth.tuning.kernel_width", "must be > 0");
            }
        }
    }

    cfg.output_dir = c.text(root, "output_dir", "run");

    // analysis
    if (root.contains("analysis")) {
        const json& a = root["analysis"];
        c.known_keys(a, "analysis", {"gamma", "delta_frac", "ratemap_resolution"});
        cfg.analysis.gamma = c.number(a, "gamma", 0.01);
        if (cfg.analysis.gamma < 0.0) c.fail("analysis.gamma", "must be >= 0");
        cfg.analysis.delta_frac = c.number(a, "delta_frac", 0.02);
        if (!(cfg.analysis.delta_frac > 0.0)) c.fail("analysis.delta_frac", "must be > 0");
        const double res = c.number(a, "ratemap_resolution", 32.0);
        if (res < 1 || res != std::floor(res))
            c.fail("analysis.ratemap_resolution", "must be a positive integer");
        else
            cfg.analysis.ratemap_resolution = static_cast<int>(res);
    }

    // cross-field invariants, checked only when the pieces parsed cleanly
    if (c.problems.empty()) {
        for (std::size_t a = 0; a < cfg.grid.flip_scale.size(); ++a)
            if (!(cfg.grid.flip_scale[a] > 0.5))
                c.fail("grid.flip_scale[" + std::to_string(a) + "]", "must exceed 0.5");
        if (static_cast<int>(cfg.grid.center_scale.size()) != d)
            c.fail("grid.center_scale", "length must match the space dimension");
        if (static_cast<int>(cfg.grid.flip_scale.size()) != d)
            c.fail("grid.flip_scale", "length must match the space dimension");
        if (cfg.grid.band < 0.0) c.fail("grid.band", "must be >= 0");
        if (d > 0 && cfg.grid.band >= 0.5 * cfg.bounds.min_width())
            c.fail("grid.band", "must be below half the narrowest axis width");
        for (int a = 0; a < d && static_cast<int>(cfg.grid.center_scale.size()) == d; ++a) {
            const double mid = cfg.bounds.axis(a).center() * cfg.grid.center_scale[static_cast<std::size_t>(a)];
            if (!(mid > cfg.bounds.axis(a).lo && mid < cfg.bounds.axis(a).hi))
                c.fail("grid.center_scale[" + std::to_string(a) + "]",
                       "pushes the reference line outside the bounds");
        }
        if (cfg.dataset_csv.empty() && !cfg.has_synth)
            c.fail("data", "provide either data.csv or data.synth");
    }

    if (!c.problems.empty()) throw ConfigError(std::move(c.problems));

    cfg.synth.trajectory.bounds = cfg.bounds;
    cfg.synth.trajectory.steps = cfg.synth.samples;
    cfg.synth.trajectory.seed = cfg.seed;
    return cfg;
}

std::string config_echo(const RunConfig& cfg) {
    json root;
    root["seed"] = cfg.seed;
    json bounds;
    std::vector<double> lo, hi;
    for (const Interval& ax : cfg.bounds.axes) {
        lo.push_back(ax.lo);
        hi.push_back(ax.hi);
    }
    bounds["min"] = lo;
    bounds["max"] = hi;
    root["bounds"] = bounds;

    json grid;
    grid["depth"] = cfg.grid.depth;
    grid["center_scale"] = cfg.grid.center_scale;
    grid["flip_scale"] = cfg.grid.flip_scale;
    grid["band"] = cfg.grid.band;
    grid["deflect_x"] = cfg.grid.deflect_x;
    grid["deflect_y"] = cfg.grid.deflect_y;
    grid["band_policy"] = cfg.grid.band_policy == BandPolicy::Dropout ? "dropout" : "fallback";
    root["grid"] = grid;

    json decoder;
    decoder["kind"] = cfg.decoder == DecoderKind::Pca ? "pca" : "oracle";
    decoder["reflect_axes"] = cfg.oracle.reflect_axes;
    decoder["noise_sd"] = cfg.oracle.noise_sd;
    root["decoder"] = decoder;

    root["exploitation"] = json{{"ridge", cfg.ridge}};

    json run;
    run["mode"] = cfg.mode == RunMode::Interaction ? "interaction"
                  : cfg.mode == RunMode::Self      ? "self"
                                                   : "both";
    run["epochs"] = cfg.epochs;
    run["split"] = cfg.split;
    run["refit"] = cfg.refit == RefitMode::None ? "none" : "refit";
    root["run"] = run;

    if (!cfg.sweep_depths.empty()) root["sweep"] = json{{"depths", cfg.sweep_depths}};

    json data;
    if (!cfg.dataset_csv.empty()) data["csv"] = cfg.dataset_csv;
    if (cfg.has_synth) {
        json sy;
        sy["samples"] = static_cast<std::int64_t>(cfg.synth.samples);
        json t;
        if (const auto* walk = std::get_if<SmoothedRandomWalk>(&cfg.synth.trajectory.kind)) {
            t["kind"] = "walk";
            t["step_sd"] = walk->step_sd;
            t["smoothing"] = walk->smoothing;
        } else {
            const auto& l = std::get<Lissajous>(cfg.synth.trajectory.kind);
            t["kind"] = "lissajous";
            t["frequencies"] = l.frequencies;
            t["phases"] = l.phases;
        }
        sy["trajectory"] = t;
        json tu;
        tu["channels"] = cfg.synth.channels;
        tu["history"] = cfg.synth.tuning.history;
        tu["gain"] = cfg.synth.tuning.gain;
        tu["baseline"] = cfg.synth.tuning.baseline;
        tu["noise_sd"] = cfg.synth.tuning.noise_sd;
        tu["kernel"] = cfg.synth.tuning.kernel == TuningModel::Kernel::Linear ? "linear" : "gaussian";
        tu["kernel_width"] = cfg.synth.tuning.kernel_width;
        sy["tuning"] = tu;
        data["synth"] = sy;
    }
    root["data"] = data;

    root["output_dir"] = cfg.output_dir;
    json analysis;
    analysis["gamma"] = cfg.analysis.gamma;
    analysis["delta_frac"] = cfg.analysis.delta_frac;
    analysis["ratemap_resolution"] = cfg.analysis.ratemap_resolution;
    root["analysis"] = analysis;

    return root.dump(2) + "\n";
}

LoopSettings loop_settings(const RunConfig& cfg) {
    LoopSettings s;
    s.bounds = cfg.bounds;
    s.grid = cfg.grid;
    s.ridge = cfg.ridge;
    s.epochs = cfg.epochs;
    s.train_fraction = cfg.split;
    s.refit = cfg.refit;
    return s;
}

}  // namespace gridsd
