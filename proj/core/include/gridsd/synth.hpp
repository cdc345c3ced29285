#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <variant>
#include <vector>

#include "gridsd/geometry.hpp"

namespace gridsd {

/// Smoothed Gaussian random walk with reflective boundaries.
struct SmoothedRandomWalk {
    double step_sd = 0.3;
    double smoothing = 0.7;  // momentum carried between steps, in [0, 1)
};

/// Closed analytic curve spanning the bounds.
struct Lissajous {
    std::vector<double> frequencies;  // cycles over the whole run, per axis
    std::vector<double> phases;      // radians, per axis
};

struct TrajectoryModel {
    std::variant<SmoothedRandomWalk, Lissajous> kind = SmoothedRandomWalk{};
    SpaceBounds bounds;
    Eigen::Index steps = 0;
    std::uint64_t seed = 0;
};

/// Position-tuned channel bank. Channel response is
/// baseline + gain * kernel(position, preferred) + noise, and each sample's
/// feature row stacks the current and previous history-1 responses.
struct TuningModel {
    enum class Kernel : std::uint8_t { Linear, Gaussian };

    Eigen::MatrixXd preferred;  // channels x d
    double gain = 1.0;
    double baseline = 0.0;
    double noise_sd = 0.0;
    int history = 1;
    Kernel kernel = Kernel::Gaussian;
    double kernel_width = 1.0;  // Gaussian kernel only
};

/// Preferred positions on a jittered lattice covering the bounds.
Eigen::MatrixXd lattice_preferred(const SpaceBounds& bounds, int channels, std::uint64_t seed);

/// K x d positions inside the bounds, deterministic per seed.
Eigen::MatrixXd gen_trajectory(const TrajectoryModel& model);

/// K x (channels * history) response windows for a trajectory.
Eigen::MatrixXd gen_neural(const Eigen::MatrixXd& trajectory, const TuningModel& tuning,
                           std::uint64_t seed);

/// Stand-in for an unsupervised decode: each listed axis is reflected about
/// the space center, every axis gets additive Gaussian noise.
Eigen::MatrixXd oracle_unsupervised(const Eigen::MatrixXd& trajectory, const SpaceBounds& bounds,
                                    const std::vector<int>& reflect_axes, double noise_sd,
                                    std::uint64_t seed);

}  // namespace gridsd
