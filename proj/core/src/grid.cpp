#include "gridsd/grid.hpp"

#include <cmath>
#include <string>

namespace gridsd {

namespace {

double scale_for_axis(const std::vector<double>& scales, int axis, double fallback) {
    if (scales.empty()) return fallback;
    return scales.at(static_cast<std::size_t>(axis));
}

}  // namespace

void GridParams::validate(const SpaceBounds& bounds) const {
    bounds.validate();
    const int d = bounds.dim();
    if (depth < 0) throw std::invalid_argument("grid.depth must be >= 0");
    if (!center_scale.empty() && static_cast<int>(center_scale.size()) != d)
        throw std::invalid_argument("grid.center_scale length must match dimension");
    if (!flip_scale.empty() && static_cast<int>(flip_scale.size()) != d)
        throw std::invalid_argument("grid.flip_scale length must match dimension");
    for (double f : flip_scale) {
        if (!(f > 0.5))
            throw std::invalid_argument("grid.flip_scale must exceed 0.5");
    }
    if (band < 0.0) throw std::invalid_argument("grid.band must be >= 0");
    if (band >= 0.5 * bounds.min_width())
        throw std::invalid_argument("grid.band must be below half the narrowest axis width");
    for (int a = 0; a < d; ++a) {
        const double cs = scale_for_axis(center_scale, a, 1.0);
        const double mid = bounds.axis(a).center() * cs;
        if (!(mid > bounds.axis(a).lo && mid < bounds.axis(a).hi))
            throw std::invalid_argument("grid.center_scale pushes the reference line outside axis " +
                                        std::to_string(a));
    }
}

double midline(const Interval& axis, double center_scale) {
    const double mid = axis.center() * center_scale;
    if (!(mid > axis.lo && mid < axis.hi))
        throw std::invalid_argument("reference line outside the open interval");
    return mid;
}

Interval child_bounds(const Interval& axis, double center_scale, int bit) {
    const double mid = midline(axis, center_scale);
    return bit ? Interval{mid, axis.hi} : Interval{axis.lo, mid};
}

int encode_bit_interaction(double z, const Interval& axis, double center_scale) {
    const double mid = midline(axis, center_scale);
    return axis.clamp(z) >= mid ? 1 : 0;
}

BitOutcome encode_bit_self(double z, const Interval& axis, double center_scale, double band,
                           BandPolicy policy) {
    const double mid = midline(axis, center_scale);
    const double zc = axis.clamp(z);
    if (zc > mid + band) return BitOutcome::Bit1;
    if (zc < mid - band) return BitOutcome::Bit0;
    return policy == BandPolicy::Dropout ? BitOutcome::Dropped : BitOutcome::Deferred;
}

EncodeResult encode_position(const std::vector<double>& point, const SpaceBounds& bounds,
                             const GridParams& params, EncodeMode mode) {
    const int d = bounds.dim();
    if (static_cast<int>(point.size()) != d)
        throw std::invalid_argument("encode_position: point dimension mismatch");

    EncodeResult out;
    out.code.bits.resize(static_cast<std::size_t>(d));
    out.status.resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double cs = params.center_scale.empty() ? 1.0 : params.center_scale[static_cast<std::size_t>(a)];
        Interval cur = bounds.axis(a);
        const double z = cur.clamp(point[static_cast<std::size_t>(a)]);
        auto& bits = out.code.bits[static_cast<std::size_t>(a)];
        bits.reserve(static_cast<std::size_t>(params.depth));
        for (int level = 1; level <= params.depth; ++level) {
            int bit;
            if (mode == EncodeMode::Interaction) {
                bit = encode_bit_interaction(z, cur, cs);
            } else {
                const BitOutcome o = encode_bit_self(z, cur, cs, params.band, params.band_policy);
                if (!is_bit(o)) {
                    out.status[static_cast<std::size_t>(a)] = {o == BitOutcome::Dropped
                                                                   ? AxisEncode::Dropped
                                                                   : AxisEncode::Deferred,
                                                               level};
                    break;
                }
                bit = bit_value(o);
            }
            bits.push_back(static_cast<std::uint8_t>(bit));
            cur = child_bounds(cur, cs, bit);
        }
    }
    return out;
}

double correct_axis(double z_pred, const Interval& axis, double center_scale, double flip_scale) {
    const double mid = midline(axis, center_scale);
    return axis.clamp(z_pred + 2.0 * flip_scale * (mid - z_pred));
}

UpdateResult update_multilevel(const std::vector<double>& z_pred, const BitCode& code_pred,
                               const BitCode& code_true, const SpaceBounds& bounds,
                               const GridParams& params) {
    const int d = bounds.dim();
    if (code_true.dim() != d || code_pred.dim() != d || static_cast<int>(z_pred.size()) != d)
        throw std::invalid_argument("update_multilevel: dimension mismatch");

    UpdateResult out;
    out.corrected.resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double cs = params.center_scale.empty() ? 1.0 : params.center_scale[static_cast<std::size_t>(a)];
        const double fs = params.flip_scale.empty() ? 1.0 : params.flip_scale[static_cast<std::size_t>(a)];
        Interval cur = bounds.axis(a);
        double z = cur.clamp(z_pred[static_cast<std::size_t>(a)]);
        const auto& pred_bits = code_pred.bits[static_cast<std::size_t>(a)];
        const auto& true_bits = code_true.bits[static_cast<std::size_t>(a)];
        const int levels = std::min<int>(params.depth, static_cast<int>(true_bits.size()));
        bool touched = false;  // once corrected, pred_bits are stale
        for (int level = 1; level <= levels; ++level) {
            const int want = true_bits[static_cast<std::size_t>(level - 1)];
            const int got = (!touched && level <= static_cast<int>(pred_bits.size()))
                                ? pred_bits[static_cast<std::size_t>(level - 1)]
                                : encode_bit_interaction(z, cur, cs);
            if (got != want) {
                const double raw = z + 2.0 * fs * (midline(cur, cs) - z);
                const double post = cur.clamp(raw);
                out.corrections.push_back({a, level, z, post, post != raw});
                z = post;
                touched = true;
            }
            cur = child_bounds(cur, cs, want);
        }
        out.corrected[static_cast<std::size_t>(a)] = z;
    }
    return out;
}

int encode_bit_deflected(const std::vector<double>& point, const SpaceBounds& bounds,
                         const GridParams& params, Axis2D axis) {
    if (bounds.dim() != 2 || point.size() != 2)
        throw std::invalid_argument("encode_bit_deflected requires a two-dimensional space");
    const double cx = midline(bounds.axis(0), params.center_scale.empty() ? 1.0 : params.center_scale[0]);
    const double cy = midline(bounds.axis(1), params.center_scale.empty() ? 1.0 : params.center_scale[1]);
    const double px = point[0] - cx;
    const double py = point[1] - cy;
    // Signed distance to the deflected reference line through the scaled
    // center; the normal points toward the bit-1 half-plane. Well defined at
    // every angle, unlike the cot/tan closed form.
    double s;
    if (axis == Axis2D::X) {
        s = px * std::cos(params.deflect_y) + py * std::sin(params.deflect_y);
    } else {
        s = -px * std::sin(params.deflect_x) + py * std::cos(params.deflect_x);
    }
    return s >= 0.0 ? 1 : 0;
}

double correct_axis_deflected(double x_pred, double y_pred, const SpaceBounds& bounds,
                              const GridParams& params, Axis2D axis) {
    if (bounds.dim() != 2)
        throw std::invalid_argument("correct_axis_deflected requires a two-dimensional space");
    const double cx = midline(bounds.axis(0), params.center_scale.empty() ? 1.0 : params.center_scale[0]);
    const double cy = midline(bounds.axis(1), params.center_scale.empty() ? 1.0 : params.center_scale[1]);
    const double fx = cx - x_pred;
    const double fy = cy - y_pred;
    if (axis == Axis2D::X) {
        const double cb = std::cos(params.deflect_y);
        const double sb = std::sin(params.deflect_y);
        return bounds.axis(0).clamp(x_pred + 2.0 * cb * cb * fx + 2.0 * sb * cb * fy);
    }
    const double ca = std::cos(params.deflect_x);
    const double sa = std::sin(params.deflect_x);
    return bounds.axis(1).clamp(y_pred + 2.0 * ca * ca * fy - 2.0 * sa * ca * fx);
}

std::vector<Interval> cell_bounds(const BitCode& code, const SpaceBounds& bounds,
                                  const GridParams& params) {
    const int d = bounds.dim();
    if (code.dim() != d) throw std::invalid_argument("cell_bounds: dimension mismatch");
    std::vector<Interval> cell;
    cell.reserve(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        const double cs = params.center_scale.empty() ? 1.0 : params.center_scale[static_cast<std::size_t>(a)];
        Interval cur = bounds.axis(a);
        for (std::uint8_t bit : code.bits[static_cast<std::size_t>(a)])
            cur = child_bounds(cur, cs, bit);
        cell.push_back(cur);
    }
    return cell;
}

namespace {

void collect_lines(const Interval& axis, double center_scale, int level, int max_level,
                   std::vector<double>& out) {
    if (level > max_level) return;
    const double mid = midline(axis, center_scale);
    out.push_back(mid);
    collect_lines({axis.lo, mid}, center_scale, level + 1, max_level, out);
    collect_lines({mid, axis.hi}, center_scale, level + 1, max_level, out);
}

}  // namespace

std::vector<std::vector<double>> reference_lines(const SpaceBounds& bounds,
                                                 const GridParams& params, int max_level) {
    std::vector<std::vector<double>> lines(static_cast<std::size_t>(bounds.dim()));
    for (int a = 0; a < bounds.dim(); ++a) {
        const double cs = params.center_scale.empty() ? 1.0 : params.center_scale[static_cast<std::size_t>(a)];
        collect_lines(bounds.axis(a), cs, 1, max_level, lines[static_cast<std::size_t>(a)]);
    }
    return lines;
}

}  // namespace gridsd
