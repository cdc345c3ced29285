#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridsd/pipeline.hpp"

namespace gridsd {

struct Metrics {
    std::vector<double> rmse_per_axis;
    double rmse = 0.0;
    std::vector<double> correlation_per_axis;  // Pearson; 0 under zero variance
};

Metrics compute_metrics(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth);

/// Histogram of correction events over the first two axes, normalized by
/// occupancy. Cells nobody visited have no rate, not a zero rate.
struct RateMap {
    int resolution_x = 0;
    int resolution_y = 0;
    Eigen::MatrixXd event_counts;   // resolution_x x resolution_y
    Eigen::MatrixXd sample_counts;  // same shape
    Eigen::MatrixXd rate;           // events / samples, NaN where unvisited
};

RateMap correction_rate_map(const std::vector<CorrectionEvent>& events,
                            const Eigen::MatrixXd& samples, const SpaceBounds& bounds,
                            int resolution);

/// Fraction of correction events whose true position lies within delta of any
/// reference line (depth <= N), divided by the same fraction over all
/// samples. Above 1 means corrections cluster at the lines. Undefined when no
/// sample sits within delta of a line.
struct BoundaryAffinity {
    std::optional<double> ratio;
    double event_fraction = 0.0;
    double sample_fraction = 0.0;
};

BoundaryAffinity boundary_affinity(const std::vector<CorrectionEvent>& events,
                                   const Eigen::MatrixXd& samples, const SpaceBounds& bounds,
                                   const GridParams& params, double delta);

struct SweepRow {
    int depth = 0;
    double test_rmse = 0.0;
    std::vector<double> mismatch_rate;
    long long interaction_bits = 0;
    double wall_ms = 0.0;
    std::string error;  // non-empty when this row's run failed

    bool ok() const { return error.empty(); }
};

struct SweepTable {
    int dim = 0;
    std::vector<SweepRow> rows;
};

/// One interaction run per requested depth, all other settings and seeds held
/// fixed. A failed run records its error and the sweep continues.
SweepTable sweep_n(const LoopSettings& settings, const Dataset& data,
                   const std::function<std::unique_ptr<ExplorationDecoder>()>& make_decoder,
                   const std::vector<int>& depths);

/// Depth maximizing accuracy minus complexity: score = -rmse - gamma * d * N,
/// ties broken toward the smaller depth.
int select_n(const SweepTable& table, double gamma);

/// Index of the best score, ties toward the earlier entry.
std::size_t argmax_score(const std::vector<double>& scores);

/// Per-epoch order of the run's bits: 1 - mean per-level mismatch rate.
std::vector<double> order_score(const RunResult& result);

}  // namespace gridsd
