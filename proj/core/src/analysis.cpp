#include "gridsd/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gridsd {

Metrics compute_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols())
        throw std::invalid_argument("metrics: shape mismatch");
    if (pred.rows() == 0) throw std::invalid_argument("metrics: empty input");

    Metrics m;
    const Eigen::Index d = pred.cols();
    m.rmse_per_axis.resize(static_cast<std::size_t>(d));
    m.correlation_per_axis.resize(static_cast<std::size_t>(d));
    for (Eigen::Index a = 0; a < d; ++a) {
        const Eigen::ArrayXd diff = (pred.col(a) - truth.col(a)).array();
        m.rmse_per_axis[static_cast<std::size_t>(a)] = std::sqrt(diff.square().mean());

        const Eigen::ArrayXd p = pred.col(a).array() - pred.col(a).mean();
        const Eigen::ArrayXd t = truth.col(a).array() - truth.col(a).mean();
        const double denom = std::sqrt(p.square().sum() * t.square().sum());
        m.correlation_per_axis[static_cast<std::size_t>(a)] =
            denom > 0.0 ? (p * t).sum() / denom : 0.0;
    }
    m.rmse = std::sqrt((pred - truth).array().square().mean());
    return m;
}

namespace {

int bin_of(double z, const Interval& ax, int resolution) {
    const double frac = (ax.clamp(z) - ax.lo) / ax.width();
    return std::min(resolution - 1, static_cast<int>(frac * resolution));
}

}  // namespace

RateMap correction_rate_map(const std::vector<CorrectionEvent>& events,
                            const Eigen::MatrixXd& samples, const SpaceBounds& bounds,
                            int resolution) {
    if (resolution < 1) throw std::invalid_argument("rate map: resolution must be >= 1");
    const bool two_d = bounds.dim() >= 2;

    RateMap map;
    map.resolution_x = resolution;
    map.resolution_y = two_d ? resolution : 1;
    map.event_counts = Eigen::MatrixXd::Zero(map.resolution_x, map.resolution_y);
    map.sample_counts = Eigen::MatrixXd::Zero(map.resolution_x, map.resolution_y);

    for (Eigen::Index k = 0; k < samples.rows(); ++k) {
        const int i = bin_of(samples(k, 0), bounds.axis(0), map.resolution_x);
        const int j = two_d ? bin_of(samples(k, 1), bounds.axis(1), map.resolution_y) : 0;
        map.sample_counts(i, j) += 1.0;
    }
    for (const CorrectionEvent& e : events) {
        if (e.true_pos.empty()) continue;
        const int i = bin_of(e.true_pos[0], bounds.axis(0), map.resolution_x);
        const int j = two_d && e.true_pos.size() > 1
                          ? bin_of(e.true_pos[1], bounds.axis(1), map.resolution_y)
                          : 0;
        map.event_counts(i, j) += 1.0;
    }

    map.rate.resize(map.resolution_x, map.resolution_y);
    for (int i = 0; i < map.resolution_x; ++i)
        for (int j = 0; j < map.resolution_y; ++j)
            map.rate(i, j) = map.sample_counts(i, j) > 0.0
                                 ? map.event_counts(i, j) / map.sample_counts(i, j)
                                 : std::numeric_limits<double>::quiet_NaN();
    return map;
}

namespace {

bool near_any_line(const std::vector<double>& point,
                   const std::vector<std::vector<double>>& lines, double delta) {
    for (std::size_t a = 0; a < point.size() && a < lines.size(); ++a)
        for (double line : lines[a])
            if (std::abs(point[a] - line) <= delta) return true;
    return false;
}

}  // namespace

BoundaryAffinity boundary_affinity(const std::vector<CorrectionEvent>& events,
                                   const Eigen::MatrixXd& samples, const SpaceBounds& bounds,
                                   const GridParams& params, double delta) {
    if (delta <= 0.0) throw std::invalid_argument("boundary_affinity: delta must be positive");
    const auto lines = reference_lines(bounds, params, params.depth);

    BoundaryAffinity out;
    if (samples.rows() == 0) return out;

    Eigen::Index near_samples = 0;
    std::vector<double> point(static_cast<std::size_t>(samples.cols()));
    for (Eigen::Index k = 0; k < samples.rows(); ++k) {
        for (Eigen::Index a = 0; a < samples.cols(); ++a)
            point[static_cast<std::size_t>(a)] = samples(k, a);
        if (near_any_line(point, lines, delta)) ++near_samples;
    }
    out.sample_fraction = static_cast<double>(near_samples) / static_cast<double>(samples.rows());

    if (!events.empty()) {
        Eigen::Index near_events = 0;
        for (const CorrectionEvent& e : events)
            if (near_any_line(e.true_pos, lines, delta)) ++near_events;
        out.event_fraction = static_cast<double>(near_events) / static_cast<double>(events.size());
    }

    if (out.sample_fraction > 0.0 && !events.empty())
        out.ratio = out.event_fraction / out.sample_fraction;
    return out;
}

SweepTable sweep_n(const LoopSettings& settings, const Dataset& data,
                   const std::function<std::unique_ptr<ExplorationDecoder>()>& make_decoder,
                   const std::vector<int>& depths) {
    if (depths.empty()) throw std::invalid_argument("sweep_n: no depths requested");
    SweepTable table;
    table.dim = settings.bounds.dim();
    for (int depth : depths) {
        SweepRow row;
        row.depth = depth;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            LoopSettings s = settings;
            s.grid.depth = depth;
            auto decoder = make_decoder();
            const RunResult r = run_interaction(s, data, *decoder);
            const EpochMetrics& last = r.epochs.back();
            row.test_rmse = last.rmse_test;
            row.mismatch_rate = last.mismatch_rate;
            row.interaction_bits = last.interaction_bits;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::size_t argmax_score(const std::vector<double>& scores) {
    if (scores.empty()) throw std::invalid_argument("argmax_score: empty");
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

int select_n(const SweepTable& table, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("select_n: gamma must be >= 0");
    std::vector<double> scores;
    std::vector<int> depths;
    for (const SweepRow& row : table.rows) {
        if (!row.ok()) continue;
        scores.push_back(-row.test_rmse - gamma * table.dim * row.depth);
        depths.push_back(row.depth);
    }
    if (scores.empty()) throw std::invalid_argument("select_n: no usable rows");
    // Ties break toward the smaller depth: scan in ascending depth order.
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return depths[a] < depths[b]; });
    std::size_t best = order.front();
    for (std::size_t i : order)
        if (scores[i] > scores[best]) best = i;
    return depths[best];
}

std::vector<double> order_score(const RunResult& result) {
    std::vector<double> scores;
    scores.reserve(result.epochs.size());
    for (const EpochMetrics& m : result.epochs) {
        double mean = 0.0;
        for (double r : m.mismatch_rate) mean += r;
        if (!m.mismatch_rate.empty()) mean /= static_cast<double>(m.mismatch_rate.size());
        scores.push_back(1.0 - mean);
    }
    return scores;
}

}  // namespace gridsd
