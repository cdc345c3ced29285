#include "gridsd/artifacts.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridsd {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw std::runtime_error("csv: not a number: '" + s + "'");
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// Write via a temporary name in the same directory, then rename into place.
class AtomicFile {
public:
    explicit AtomicFile(const fs::path& target)
        : target_(target), tmp_(target.string() + ".tmp"), out_(tmp_, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write " + tmp_.string());
    }
    std::ostream& stream() { return out_; }
    void commit() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed: " + tmp_.string());
        fs::rename(tmp_, target_);
    }

private:
    fs::path target_;
    fs::path tmp_;
    std::ofstream out_;
};

}  // namespace

void write_dataset_csv(const Dataset& data, const fs::path& path) {
    if (data.neural.rows() != data.labels.rows())
        throw std::invalid_argument("dataset csv: row count mismatch");
    AtomicFile file(path);
    auto& out = file.stream();
    out << "t";
    for (Eigen::Index a = 0; a < data.labels.cols(); ++a) out << ",pos_" << a;
    for (Eigen::Index f = 0; f < data.neural.cols(); ++f) out << ",f_" << f;
    out << "\n";
    for (Eigen::Index k = 0; k < data.size(); ++k) {
        out << (k + 1);
        for (Eigen::Index a = 0; a < data.labels.cols(); ++a)
            out << ',' << fmt_double(data.labels(k, a));
        for (Eigen::Index f = 0; f < data.neural.cols(); ++f)
            out << ',' << fmt_double(data.neural(k, f));
        out << "\n";
    }
    file.commit();
}

Dataset read_dataset_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("dataset csv: cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("dataset csv: empty file");

    const auto header = split_csv_line(line);
    Eigen::Index d = 0, features = 0;
    for (std::size_t i = 1; i < header.size(); ++i) {
        if (header[i].rfind("pos_", 0) == 0)
            ++d;
        else if (header[i].rfind("f_", 0) == 0)
            ++features;
        else
            throw std::runtime_error("dataset csv: unexpected column '" + header[i] + "'");
    }
    if (header.empty() || header[0] != "t" || d == 0)
        throw std::runtime_error("dataset csv: header must be t,pos_*,f_*");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (static_cast<Eigen::Index>(cells.size()) != 1 + d + features)
            throw std::runtime_error("dataset csv: wrong cell count in row " +
                                     std::to_string(rows.size() + 1));
        std::vector<double> row;
        row.reserve(cells.size() - 1);
        for (std::size_t i = 1; i < cells.size(); ++i) row.push_back(parse_double(cells[i]));
        rows.push_back(std::move(row));
    }

    Dataset data;
    data.labels.resize(static_cast<Eigen::Index>(rows.size()), d);
    data.neural.resize(static_cast<Eigen::Index>(rows.size()), features);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (Eigen::Index a = 0; a < d; ++a)
            data.labels(static_cast<Eigen::Index>(k), a) = rows[k][static_cast<std::size_t>(a)];
        for (Eigen::Index f = 0; f < features; ++f)
            data.neural(static_cast<Eigen::Index>(k), f) =
                rows[k][static_cast<std::size_t>(d + f)];
    }
    return data;
}

std::string file_checksum(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checksum: cannot read " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016" PRIx64, h);
    return out;
}

void write_manifest(const fs::path& dir) {
    json files = json::object();
    std::vector<fs::path> paths;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().filename() != "manifest.json")
            paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end());
    for (const fs::path& p : paths) files[p.filename().string()] = file_checksum(p);

    AtomicFile file(dir / "manifest.json");
    file.stream() << json{{"files", files}}.dump(2) << "\n";
    file.commit();
}

std::map<std::string, std::string> read_manifest(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::runtime_error("manifest: cannot read " + (dir / "manifest.json").string());
    json root = json::parse(in);
    std::map<std::string, std::string> out;
    for (const auto& [name, sum] : root.at("files").items()) out[name] = sum.get<std::string>();
    return out;
}

namespace {

json epoch_json(const EpochMetrics& m) {
    json e;
    e["rmse_explore"] = m.rmse_explore;
    e["rmse_corrected"] = m.rmse_corrected;
    e["rmse_test"] = m.rmse_test;
    e["mismatch_rate"] = m.mismatch_rate;
    e["dropped"] = static_cast<std::int64_t>(m.dropped);
    e["deferred"] = static_cast<std::int64_t>(m.deferred);
    e["trained"] = static_cast<std::int64_t>(m.trained);
    e["interaction_bits"] = m.interaction_bits;
    return e;
}

void write_metrics_json(const RunArtifacts& a, const fs::path& path) {
    json root;
    const bool unsupervised =
        !a.phases.empty() && a.phases.front()->unsupervised && a.config.grid.depth == 0;
    root["mode"] = unsupervised ? "unsupervised"
                   : a.config.mode == RunMode::Interaction
                       ? "interaction"
                       : (a.config.mode == RunMode::Self ? "self" : "both");
    root["depth"] = a.config.grid.depth;
    root["dim"] = a.config.bounds.dim();
    root["seed"] = a.config.seed;
    json phases = json::array();
    for (const RunResult* r : a.phases) {
        json p;
        p["phase"] = r->phase;
        json epochs = json::array();
        for (const EpochMetrics& m : r->epochs) epochs.push_back(epoch_json(m));
        p["epochs"] = epochs;
        p["events"] = static_cast<std::int64_t>(r->events.size());
        phases.push_back(p);
    }
    root["phases"] = phases;
    if (!a.phases.empty()) {
        const RunResult* last = a.phases.back();
        root["final"] = json{{"test_rmse", last->epochs.back().rmse_test},
                             {"trained", static_cast<std::int64_t>(last->epochs.back().trained)}};
    }

    AtomicFile file(path);
    file.stream() << root.dump(2) << "\n";
    file.commit();
}

void write_events_csv(const RunArtifacts& a, const fs::path& path) {
    const int d = a.config.bounds.dim();
    AtomicFile file(path);
    auto& out = file.stream();
    out << "phase,epoch,sample,axis,level,pre,post,clamped";
    for (int i = 0; i < d; ++i) out << ",true_" << i;
    out << "\n";
    for (const RunResult* r : a.phases) {
        for (const CorrectionEvent& e : r->events) {
            out << r->phase << ',' << e.epoch << ',' << (e.sample + 1) << ',' << e.axis << ','
                << e.level << ',' << fmt_double(e.pre) << ',' << fmt_double(e.post) << ','
                << (e.clamped ? 1 : 0);
            for (int i = 0; i < d; ++i)
                out << ',' << fmt_double(i < static_cast<int>(e.true_pos.size()) ? e.true_pos[static_cast<std::size_t>(i)] : 0.0);
            out << "\n";
        }
    }
    file.commit();
}

void write_predictions_csv(const RunArtifacts& a, const fs::path& path) {
    const int d = a.config.bounds.dim();
    const RunResult* last = a.phases.empty() ? nullptr : a.phases.back();
    AtomicFile file(path);
    auto& out = file.stream();
    out << "t,split";
    for (int i = 0; i < d; ++i) out << ",true_" << i;
    for (int i = 0; i < d; ++i) out << ",zbar_" << i;
    for (int i = 0; i < d; ++i) out << ",ztilde_" << i;
    for (int i = 0; i < d; ++i) out << ",zhat_" << i;
    out << "\n";
    if (last != nullptr) {
        const Eigen::Index train = last->corrected.rows();
        const Eigen::Index total = a.data.size();
        for (Eigen::Index k = 0; k < total; ++k) {
            const bool is_train = k < train;
            out << (k + 1) << ',' << (is_train ? "train" : "test");
            for (int i = 0; i < d; ++i) out << ',' << fmt_double(a.data.labels(k, i));
            for (int i = 0; i < d; ++i)
                out << ',' << (is_train ? fmt_double(last->explored(k, i)) : "nan");
            for (int i = 0; i < d; ++i)
                out << ',' << (is_train ? fmt_double(last->corrected(k, i)) : "nan");
            for (int i = 0; i < d; ++i)
                out << ','
                    << (is_train ? "nan" : fmt_double(last->test_predictions(k - train, i)));
            out << "\n";
        }
    }
    file.commit();
}

void write_ratemap_csv(const RateMap& map, const fs::path& path) {
    AtomicFile file(path);
    auto& out = file.stream();
    out << "cell_0,cell_1,events,samples,rate\n";
    for (int i = 0; i < map.resolution_x; ++i)
        for (int j = 0; j < map.resolution_y; ++j)
            out << i << ',' << j << ',' << map.event_counts(i, j) << ',' << map.sample_counts(i, j)
                << ',' << fmt_double(map.rate(i, j)) << "\n";
    file.commit();
}

}  // namespace

void export_artifacts(const RunArtifacts& artifacts, const fs::path& dir) {
    const fs::path parent = dir.parent_path().empty() ? fs::path(".") : dir.parent_path();
    fs::create_directories(parent);
    const fs::path tmp = parent / (dir.filename().string() + ".tmp-export");
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    {
        AtomicFile cfg(tmp / "config.json");
        cfg.stream() << config_echo(artifacts.config);
        cfg.commit();
    }
    write_metrics_json(artifacts, tmp / "metrics.json");
    write_events_csv(artifacts, tmp / "events.csv");
    write_predictions_csv(artifacts, tmp / "predictions.csv");

    if (!artifacts.phases.empty()) {
        std::vector<CorrectionEvent> all_events;
        for (const RunResult* r : artifacts.phases)
            all_events.insert(all_events.end(), r->events.begin(), r->events.end());
        const Eigen::Index train = artifacts.phases.back()->corrected.rows();
        const RateMap map =
            correction_rate_map(all_events, artifacts.data.labels.topRows(train),
                                artifacts.config.bounds, artifacts.config.analysis.ratemap_resolution);
        write_ratemap_csv(map, tmp / "ratemap.csv");
    }

    write_manifest(tmp);
    fs::remove_all(dir);
    fs::rename(tmp, dir);
}

void write_sweep_csv(const SweepTable& table, const fs::path& path) {
    int max_depth = 0;
    for (const SweepRow& row : table.rows) max_depth = std::max(max_depth, row.depth);
    AtomicFile file(path);
    auto& out = file.stream();
    out << "n,dim,test_rmse,interaction_bits,wall_ms,error";
    for (int l = 1; l <= max_depth; ++l) out << ",mismatch_l" << l;
    out << "\n";
    for (const SweepRow& row : table.rows) {
        out << row.depth << ',' << table.dim << ',' << fmt_double(row.test_rmse) << ','
            << row.interaction_bits << ',' << fmt_double(row.wall_ms) << ',' << row.error;
        for (int l = 0; l < max_depth; ++l)
            out << ','
                << (l < static_cast<int>(row.mismatch_rate.size())
                        ? fmt_double(row.mismatch_rate[static_cast<std::size_t>(l)])
                        : "nan");
        out << "\n";
    }
    file.commit();
}

std::vector<CorrectionEvent> read_events_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("events csv: cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("events csv: empty file");
    const auto header = split_csv_line(line);
    std::size_t first_true = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i].rfind("true_", 0) == 0) {
            first_true = i;
            break;
        }

    std::vector<CorrectionEvent> events;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size()) throw std::runtime_error("events csv: malformed row");
        CorrectionEvent e;
        e.epoch = static_cast<int>(parse_double(cells[1]));
        e.sample = static_cast<Eigen::Index>(parse_double(cells[2])) - 1;
        e.axis = static_cast<int>(parse_double(cells[3]));
        e.level = static_cast<int>(parse_double(cells[4]));
        e.pre = parse_double(cells[5]);
        e.post = parse_double(cells[6]);
        e.clamped = parse_double(cells[7]) != 0.0;
        for (std::size_t i = first_true; i < cells.size(); ++i)
            e.true_pos.push_back(parse_double(cells[i]));
        events.push_back(std::move(e));
    }
    return events;
}

Eigen::MatrixXd read_train_positions_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("predictions csv: cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("predictions csv: empty file");
    const auto header = split_csv_line(line);
    std::vector<std::size_t> true_cols;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i].rfind("true_", 0) == 0) true_cols.push_back(i);
    if (true_cols.empty()) throw std::runtime_error("predictions csv: no true_* columns");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw std::runtime_error("predictions csv: malformed row");
        if (cells[1] != "train") continue;
        std::vector<double> row;
        for (std::size_t i : true_cols) row.push_back(parse_double(cells[i]));
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(true_cols.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t a = 0; a < true_cols.size(); ++a)
            out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = rows[k][a];
    return out;
}

SweepTable read_sweep_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("sweep csv: cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("sweep csv: empty file");
    SweepTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < 6) throw std::runtime_error("sweep csv: malformed row");
        SweepRow row;
        row.depth = static_cast<int>(parse_double(cells[0]));
        table.dim = static_cast<int>(parse_double(cells[1]));
        row.test_rmse = parse_double(cells[2]);
        row.interaction_bits = static_cast<long long>(parse_double(cells[3]));
        row.wall_ms = parse_double(cells[4]);
        row.error = cells[5];
        for (std::size_t i = 6; i < cells.size(); ++i)
            if (cells[i] != "nan") row.mismatch_rate.push_back(parse_double(cells[i]));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace gridsd
