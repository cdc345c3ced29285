#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gridsd {

/// Closed interval [lo, hi] on one axis of the activity space.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
    bool contains(double z) const { return z >= lo && z <= hi; }
    double clamp(double z) const { return z < lo ? lo : (z > hi ? hi : z); }
    bool valid() const { return lo < hi; }
};

/// Per-axis extents of the d-dimensional activity space.
struct SpaceBounds {
    std::vector<Interval> axes;

    int dim() const { return static_cast<int>(axes.size()); }
    const Interval& axis(int a) const { return axes.at(static_cast<std::size_t>(a)); }

    double min_width() const {
        double w = axes.empty() ? 0.0 : axes.front().width();
        for (const auto& ax : axes) w = std::min(w, ax.width());
        return w;
    }

    void validate() const {
        if (axes.empty()) throw std::invalid_argument("bounds: need at least one axis");
        for (std::size_t a = 0; a < axes.size(); ++a) {
            if (!axes[a].valid())
                throw std::invalid_argument("bounds: axis " + std::to_string(a) +
                                            " has min >= max");
        }
    }
};

inline SpaceBounds make_bounds(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("bounds: min/max size mismatch");
    SpaceBounds b;
    b.axes.reserve(lo.size());
    for (std::size_t a = 0; a < lo.size(); ++a) b.axes.push_back({lo[a], hi[a]});
    b.validate();
    return b;
}

}  // namespace gridsd
