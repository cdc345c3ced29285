#include "gridsd/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "gridsd/rng.hpp"

namespace gridsd {

namespace {

// Fold a coordinate back into [lo, hi] by mirroring at the walls.
double reflect_into(double z, const Interval& ax) {
    const double w = ax.width();
    double t = std::fmod(z - ax.lo, 2.0 * w);
    if (t < 0.0) t += 2.0 * w;
    return ax.lo + (t <= w ? t : 2.0 * w - t);
}

Eigen::MatrixXd walk_trajectory(const SmoothedRandomWalk& walk, const SpaceBounds& bounds,
                                Eigen::Index steps, std::uint64_t seed) {
    const int d = bounds.dim();
    Rng rng = substream(seed, "trajectory");
    Eigen::MatrixXd pos(steps, d);
    std::vector<double> cur(static_cast<std::size_t>(d));
    std::vector<double> vel(static_cast<std::size_t>(d), 0.0);
    for (int a = 0; a < d; ++a) cur[static_cast<std::size_t>(a)] = bounds.axis(a).center();
    for (Eigen::Index k = 0; k < steps; ++k) {
        for (int a = 0; a < d; ++a) {
            auto& v = vel[static_cast<std::size_t>(a)];
            auto& z = cur[static_cast<std::size_t>(a)];
            v = walk.smoothing * v + rng.normal(0.0, walk.step_sd);
            z = reflect_into(z + v, bounds.axis(a));
            pos(k, a) = z;
        }
    }
    return pos;
}

Eigen::MatrixXd lissajous_trajectory(const Lissajous& curve, const SpaceBounds& bounds,
                                     Eigen::Index steps) {
    const int d = bounds.dim();
    if (static_cast<int>(curve.frequencies.size()) != d)
        throw std::invalid_argument("lissajous: frequency count must match dimension");
    Eigen::MatrixXd pos(steps, d);
    for (Eigen::Index k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        for (int a = 0; a < d; ++a) {
            const double phase =
                a < static_cast<int>(curve.phases.size()) ? curve.phases[static_cast<std::size_t>(a)] : 0.0;
            const Interval& ax = bounds.axis(a);
            const double s =
                std::sin(2.0 * M_PI * curve.frequencies[static_cast<std::size_t>(a)] * t + phase);
            pos(k, a) = ax.center() + 0.5 * ax.width() * s;
        }
    }
    return pos;
}

}  // namespace

Eigen::MatrixXd lattice_preferred(const SpaceBounds& bounds, int channels, std::uint64_t seed) {
    if (channels <= 0) throw std::invalid_argument("lattice_preferred: need channels > 0");
    const int d = bounds.dim();
    Rng rng = substream(seed, "tuning_lattice");
    const int per_axis = std::max(1, static_cast<int>(std::ceil(
                                         std::pow(static_cast<double>(channels), 1.0 / d))));
    Eigen::MatrixXd pref(channels, d);
    for (int c = 0; c < channels; ++c) {
        int idx = c;
        for (int a = 0; a < d; ++a) {
            const Interval& ax = bounds.axis(a);
            const int cell = idx % per_axis;
            idx /= per_axis;
            const double frac = (cell + 0.5) / per_axis;
            const double jitter = 0.25 * ax.width() / per_axis * rng.normal();
            pref(c, a) = ax.clamp(ax.lo + frac * ax.width() + jitter);
        }
    }
    return pref;
}

Eigen::MatrixXd gen_trajectory(const TrajectoryModel& model) {
    model.bounds.validate();
    if (model.steps <= 0) throw std::invalid_argument("gen_trajectory: need steps > 0");
    if (const auto* walk = std::get_if<SmoothedRandomWalk>(&model.kind))
        return walk_trajectory(*walk, model.bounds, model.steps, model.seed);
    return lissajous_trajectory(std::get<Lissajous>(model.kind), model.bounds, model.steps);
}

Eigen::MatrixXd gen_neural(const Eigen::MatrixXd& trajectory, const TuningModel& tuning,
                           std::uint64_t seed) {
    const Eigen::Index steps = trajectory.rows();
    const Eigen::Index channels = tuning.preferred.rows();
    const int d = static_cast<int>(trajectory.cols());
    if (tuning.preferred.cols() != d)
        throw std::invalid_argument("gen_neural: preferred positions do not match dimension");
    if (tuning.history < 1) throw std::invalid_argument("gen_neural: history must be >= 1");
    if (tuning.noise_sd < 0.0) throw std::invalid_argument("gen_neural: negative noise");

    Eigen::MatrixXd response(steps, channels);
    Rng rng = substream(seed, "neural_noise");
    for (Eigen::Index k = 0; k < steps; ++k) {
        for (Eigen::Index c = 0; c < channels; ++c) {
            double act;
            if (tuning.kernel == TuningModel::Kernel::Linear) {
                act = tuning.preferred.row(c).dot(trajectory.row(k));
            } else {
                const double d2 = (trajectory.row(k) - tuning.preferred.row(c)).squaredNorm();
                act = std::exp(-0.5 * d2 / (tuning.kernel_width * tuning.kernel_width));
            }
            double r = tuning.baseline + tuning.gain * act;
            if (tuning.noise_sd > 0.0) r += rng.normal(0.0, tuning.noise_sd);
            response(k, c) = r;
        }
    }

    // Window: columns [c * history + t] hold channel c at lag t, with the
    // leading edge clamped to the first sample.
    Eigen::MatrixXd neural(steps, channels * tuning.history);
    for (Eigen::Index k = 0; k < steps; ++k)
        for (Eigen::Index c = 0; c < channels; ++c)
            for (int t = 0; t < tuning.history; ++t)
                neural(k, c * tuning.history + t) = response(std::max<Eigen::Index>(0, k - t), c);
    return neural;
}

Eigen::MatrixXd oracle_unsupervised(const Eigen::MatrixXd& trajectory, const SpaceBounds& bounds,
                                    const std::vector<int>& reflect_axes, double noise_sd,
                                    std::uint64_t seed) {
    if (static_cast<int>(trajectory.cols()) != bounds.dim())
        throw std::invalid_argument("oracle_unsupervised: dimension mismatch");
    if (noise_sd < 0.0) throw std::invalid_argument("oracle_unsupervised: negative noise");

    Eigen::MatrixXd out = trajectory;
    for (int a : reflect_axes) {
        if (a < 0 || a >= bounds.dim())
            throw std::invalid_argument("oracle_unsupervised: reflect axis out of range");
        const double c = bounds.axis(a).center();
        out.col(a) = (2.0 * c - out.col(a).array()).matrix();
    }
    if (noise_sd > 0.0) {
        Rng rng = substream(seed, "oracle_noise");
        for (Eigen::Index k = 0; k < out.rows(); ++k)
            for (Eigen::Index a = 0; a < out.cols(); ++a) out(k, a) += rng.normal(0.0, noise_sd);
    }
    return out;
}

}  // namespace gridsd
