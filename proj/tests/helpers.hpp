#pragma once

#include <Eigen/Core>
#include <random>
#include <vector>

#include "gridsd/geometry.hpp"
#include "gridsd/grid.hpp"

namespace testutil {

inline gridsd::SpaceBounds box1d(double lo = 0.0, double hi = 10.0) {
    return gridsd::make_bounds({lo}, {hi});
}

inline gridsd::SpaceBounds box2d(double lo = 0.0, double hi = 10.0) {
    return gridsd::make_bounds({lo, lo}, {hi, hi});
}

inline gridsd::GridParams params(int depth, int dim, double center = 1.0, double flip = 1.0) {
    gridsd::GridParams p;
    p.depth = depth;
    p.center_scale.assign(static_cast<std::size_t>(dim), center);
    p.flip_scale.assign(static_cast<std::size_t>(dim), flip);
    return p;
}

/// Independent route to the interaction code for a centered split: the code
/// of z on [lo, hi] is the binary expansion of (z - lo) / (hi - lo).
inline std::vector<int> binary_expansion_code(double z, double lo, double hi, int depth) {
    double frac = (z - lo) / (hi - lo);
    std::vector<int> bits;
    for (int j = 0; j < depth; ++j) {
        frac *= 2.0;
        const int b = frac >= 1.0 ? 1 : 0;
        bits.push_back(b);
        frac -= b;
    }
    return bits;
}

}  // namespace testutil
