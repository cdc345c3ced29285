#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "gridsd/dataset.hpp"
#include "gridsd/decoders.hpp"
#include "gridsd/exploit.hpp"
#include "gridsd/grid.hpp"

namespace gridsd {

/// Whether the local method re-decodes the rows routed into each subspace.
enum class RefitMode : std::uint8_t { None, Refit };

struct LoopSettings {
    SpaceBounds bounds;
    GridParams grid;
    double ridge = 1e-6;
    int epochs = 1;
    double train_fraction = 0.7;
    RefitMode refit = RefitMode::None;
};

struct CorrectionEvent {
    Eigen::Index sample = 0;  // dataset row
    int epoch = 0;
    int axis = 0;
    int level = 0;
    double pre = 0.0;
    double post = 0.0;
    bool clamped = false;
    std::vector<double> true_pos;
};

struct EpochMetrics {
    double rmse_explore = 0.0;    // unsupervised predictions vs labels, train
    double rmse_corrected = 0.0;  // corrected labels vs truth, train
    double rmse_test = 0.0;       // exploitation predictions vs labels, test
    std::vector<double> mismatch_rate;  // fraction of mismatched bits per level
    Eigen::Index dropped = 0;           // samples lost to the uncertainty band
    Eigen::Index deferred = 0;          // band hits resolved by interaction
    Eigen::Index trained = 0;           // rows in the exploitation fit
    long long interaction_bits = 0;     // external bits consumed this epoch
};

struct RunResult {
    std::string phase;          // "interaction" or "self"
    bool unsupervised = false;  // depth 0: no feedback at all
    std::vector<EpochMetrics> epochs;
    std::vector<CorrectionEvent> events;
    Eigen::MatrixXd explored;          // last epoch, train rows
    Eigen::MatrixXd corrected;         // last epoch, train rows
    Eigen::MatrixXd test_predictions;  // last epoch, test rows
    ExploitationModel model;
    std::vector<Eigen::Index> trained_rows;  // last epoch, rows used in the fit
};

/// Decoder predictions clamped into the activity space.
Eigen::MatrixXd explore(const ExplorationDecoder& decoder, const Eigen::MatrixXd& neural,
                        const SpaceBounds& bounds);

/// Interaction-mode codes of each label row.
std::vector<BitCode> interaction_codes(const Eigen::MatrixXd& labels, const SpaceBounds& bounds,
                                       const GridParams& params);

/// Self-mode codes of the exploitation outputs, with band hits resolved:
/// Dropout truncates the axis and marks the sample dropped, fallback
/// substitutes the interaction bit of the true label (one external bit each)
/// and keeps descending.
struct SelfCodes {
    std::vector<BitCode> codes;
    std::vector<std::uint8_t> dropped;  // per sample
    Eigen::Index dropped_samples = 0;
    long long deferred_events = 0;
};
SelfCodes self_codes_resolved(const Eigen::MatrixXd& z_hat, const Eigen::MatrixXd& z_true,
                              const SpaceBounds& bounds, const GridParams& params);

/// The local method: level by level, per axis, samples are routed by their
/// external bit; with RefitMode::Refit each subspace's rows are re-decoded
/// and replace the values that entered it (subspaces smaller than the
/// decoder's minimum keep their values); the values are then encoded against
/// the subspace's reference line and mismatches flipped.
struct LocalCorrectResult {
    Eigen::MatrixXd corrected;
    std::vector<CorrectionEvent> events;  // sample = row into `predictions`
    std::vector<long long> compared;      // bits examined per level
    std::vector<long long> mismatched;    // bits corrected per level
};
LocalCorrectResult local_correct(const Eigen::MatrixXd& predictions,
                                 const Eigen::MatrixXd& neural,
                                 const std::vector<BitCode>& external_codes,
                                 const SpaceBounds& bounds, const GridParams& params,
                                 RefitMode refit = RefitMode::None,
                                 const ExplorationDecoder* decoder = nullptr);

/// One epoch-per-epoch loop driven by external (true label) bits: explore,
/// correct, train exploitation on the corrected labels, evaluate on the test
/// split. With more than one epoch the exploitation output pulls the
/// exploration map between epochs.
RunResult run_interaction(const LoopSettings& settings, const Dataset& data,
                          ExplorationDecoder& decoder);

/// The loop with the exploitation model standing in for the external world:
/// bits come from self-encoding its outputs, dropped samples never reach a
/// fit, and both models update from the survivors. Requires a model trained
/// by run_interaction.
RunResult run_self_reinforcement(const LoopSettings& settings, const Dataset& data,
                                 ExplorationDecoder& decoder, const ExploitationModel& model);

/// The smallest computing unit: decode one window, compare the bit of the
/// decoded value against the feedback bit, flip on mismatch, and forward the
/// window with the corrected bit.
struct UnitStepResult {
    double corrected_value = 0.0;
    int bit_out = 0;
    Eigen::RowVectorXd forwarded;
};
UnitStepResult unit_step(const Eigen::RowVectorXd& window, int feedback_bit,
                         const std::function<double(const Eigen::RowVectorXd&)>& decode,
                         const Interval& axis, double center_scale, double flip_scale);

}  // namespace gridsd
