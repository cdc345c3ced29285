#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gridsd/geometry.hpp"

namespace gridsd {

/// What happens to a bit that lands inside the self-encoding uncertainty band.
enum class BandPolicy : std::uint8_t {
    Dropout,                ///< discard the sample's remaining bits on this axis
    FallbackToInteraction,  ///< defer: caller substitutes the external bit
};

enum class EncodeMode : std::uint8_t { Interaction, Self };

/// Outcome of a single self-encoded bit.
enum class BitOutcome : std::uint8_t { Bit0, Bit1, Dropped, Deferred };

inline bool is_bit(BitOutcome o) { return o == BitOutcome::Bit0 || o == BitOutcome::Bit1; }
inline int bit_value(BitOutcome o) { return o == BitOutcome::Bit1 ? 1 : 0; }

/// Parameters of the divided space.
///
/// depth        recursion depth N of the binary division; 0 disables feedback
/// center_scale per-axis rate applied to each interval's center when placing
///              the reference line (1 = centered split)
/// flip_scale   per-axis rate of the symmetric correction step; must exceed
///              0.5 so a correction always crosses the reference line
/// band         half-width of the self-encoding uncertainty band, axis units
/// deflect_x/y  deflection angles (radians) of the x/y axes for the deflected
///              two-dimensional variant; zero selects the axis-aligned rules
struct GridParams {
    int depth = 0;
    std::vector<double> center_scale;
    std::vector<double> flip_scale;
    double band = 0.0;
    double deflect_x = 0.0;
    double deflect_y = 0.0;
    BandPolicy band_policy = BandPolicy::Dropout;

    void validate(const SpaceBounds& bounds) const;
};

/// Per-axis bit strings identifying a cell of the divided space.
/// Axes normally share length `depth`; self-encoding may truncate an axis.
struct BitCode {
    std::vector<std::vector<std::uint8_t>> bits;  // bits[axis][level-1]

    int dim() const { return static_cast<int>(bits.size()); }
    int depth(int axis) const { return static_cast<int>(bits[static_cast<std::size_t>(axis)].size()); }
    bool operator==(const BitCode&) const = default;
};

/// Position of the reference line inside one interval.
/// Throws std::invalid_argument if the scaled center escapes the open interval.
double midline(const Interval& axis, double center_scale);

/// Sub-interval selected by one bit: 0 keeps [lo, mid], 1 keeps [mid, hi].
Interval child_bounds(const Interval& axis, double center_scale, int bit);

/// One interaction-mode bit: 1 iff z (clamped into the interval) sits on or
/// above the reference line.
int encode_bit_interaction(double z, const Interval& axis, double center_scale);

/// One self-reinforcement bit. Strict inequalities on both sides of the band;
/// a value inside the band (including exactly on the line when band = 0) is
/// dropped or deferred per policy.
BitOutcome encode_bit_self(double z, const Interval& axis, double center_scale, double band,
                           BandPolicy policy);

/// Per-axis outcome of encode_position in Self mode.
enum class AxisEncode : std::uint8_t { Complete, Dropped, Deferred };

struct AxisEncodeStatus {
    AxisEncode outcome = AxisEncode::Complete;
    int band_level = 0;  // level of the band hit, 0 if none
};

struct EncodeResult {
    BitCode code;
    std::vector<AxisEncodeStatus> status;  // one per axis, Self mode only

    bool truncated() const {
        for (const auto& s : status)
            if (s.outcome != AxisEncode::Complete) return true;
        return false;
    }
};

/// Encode a point into its per-axis bit strings, descending depth levels.
/// Axes are independent; each level encodes within the child interval chosen
/// by the previous bit. In Self mode a band hit truncates that axis's string
/// at the previous level and records the outcome.
EncodeResult encode_position(const std::vector<double>& point, const SpaceBounds& bounds,
                             const GridParams& params,
                             EncodeMode mode = EncodeMode::Interaction);

/// Symmetric flip of a prediction about the interval's reference line,
/// clamped back into the interval if the raw result escapes it.
double correct_axis(double z_pred, const Interval& axis, double center_scale, double flip_scale);

/// One recorded bit-mismatch repair.
struct AxisCorrection {
    int axis = 0;
    int level = 0;
    double pre = 0.0;
    double post = 0.0;
    bool clamped = false;
};

struct UpdateResult {
    std::vector<double> corrected;
    std::vector<AxisCorrection> corrections;
};

/// Level-by-level repair of a predicted point against the true code.
/// Matching bits keep the value; a mismatch flips it inside the current
/// interval and records the event, after which the value's bits come from
/// re-encoding the corrected value. Descent always follows the true child.
/// True-code axes shorter than depth (truncated self codes) stop early.
UpdateResult update_multilevel(const std::vector<double>& z_pred, const BitCode& code_pred,
                               const BitCode& code_true, const SpaceBounds& bounds,
                               const GridParams& params);

/// Axis selector for the two-dimensional deflected variant.
enum class Axis2D : std::uint8_t { X, Y };

/// Deflected-axes bit: a signed half-plane test against the deflected
/// reference line through the scaled center. Equals the axis-aligned rule
/// when both deflection angles are zero; points exactly on the line get 1.
int encode_bit_deflected(const std::vector<double>& point, const SpaceBounds& bounds,
                         const GridParams& params, Axis2D axis);

/// Deflected-axes correction. With zero angles this reduces to correct_axis
/// with flip_scale 1 on the selected axis. Clamped into the axis interval.
double correct_axis_deflected(double x_pred, double y_pred, const SpaceBounds& bounds,
                              const GridParams& params, Axis2D axis);

/// Closed cell of the divided space addressed by a code (locate-to-cell; the
/// encoding itself is many-to-one and cannot be inverted to a point).
std::vector<Interval> cell_bounds(const BitCode& code, const SpaceBounds& bounds,
                                  const GridParams& params);

/// Coordinates of every reference line per axis down to max_level.
std::vector<std::vector<double>> reference_lines(const SpaceBounds& bounds,
                                                 const GridParams& params, int max_level);

}  // namespace gridsd
