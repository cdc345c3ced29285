// Golden regression pins for the reference bench configuration. Values were
// produced by the recorded run at seed 42 and must reproduce exactly on
// rebuilds; any intentional change to generators, decoders or the loop
// invalidates them together.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "gridsd/analysis.hpp"
#include "gridsd/runner.hpp"
#include "gridsd/synth.hpp"
#include "reference_config.hpp"

using namespace gridsd;
using testutil::reference_config;

namespace {

std::uint64_t matrix_checksum(const Eigen::MatrixXd& m) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (Eigen::Index k = 0; k < m.rows(); ++k)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::uint64_t bits;
            const double v = m(k, c);
            std::memcpy(&bits, &v, sizeof bits);
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xffu;
                h *= 0x100000001b3ull;
            }
        }
    return h;
}

}  // namespace

TEST_CASE("reference dataset checksums") {
    const RunConfig cfg = reference_config(6);
    const Dataset data = load_or_synthesize(cfg);
    CHECK(matrix_checksum(data.neural) == 0x6ebd623818ec76d2ull);
    CHECK(matrix_checksum(data.labels) == 0xdaed74c497250678ull);
}

TEST_CASE("reference interaction run metrics") {
    const RunConfig cfg = reference_config(6);
    const Dataset data = load_or_synthesize(cfg);
    auto decoder = make_decoder(cfg, data);
    const RunResult run = run_interaction(loop_settings(cfg), data, *decoder);
    const EpochMetrics& m = run.epochs.back();

    CHECK(m.rmse_explore == doctest::Approx(7.3948941014636453).epsilon(1e-12));
    CHECK(m.rmse_corrected == doctest::Approx(0.068289643811375436).epsilon(1e-12));
    CHECK(m.rmse_test == doctest::Approx(0.42534439024794762).epsilon(1e-12));
    CHECK(run.events.size() == 32757);
    CHECK(m.mismatch_rate[0] == doctest::Approx(0.97507142857142859).epsilon(1e-12));
    CHECK(m.mismatch_rate[5] == doctest::Approx(0.49242857142857144).epsilon(1e-12));
}

TEST_CASE("reference principal-subspace exploration") {
    const RunConfig cfg = reference_config(6);
    const Dataset data = load_or_synthesize(cfg);
    const SplitIndex split = make_split(data.size(), cfg.split);
    PcaDecoder pca(cfg.bounds, cfg.seed);
    pca.fit(data.neural.topRows(split.train_count));
    const Eigen::MatrixXd zbar = explore(pca, data.neural.topRows(split.train_count), cfg.bounds);
    const double rmse =
        std::sqrt((zbar - data.labels.topRows(split.train_count)).array().square().mean());
    // Gaussian tuning puts positions on a curved response manifold; the
    // linear principal subspace barely tracks it. Pinned as-is.
    CHECK(rmse == doctest::Approx(4.6155886372919595).epsilon(1e-12));
}

TEST_CASE("principal-subspace exploration tracks linearly tuned data") {
    const SpaceBounds bounds = make_bounds({0.0, 0.0}, {10.0, 10.0});
    TrajectoryModel traj;
    traj.bounds = bounds;
    traj.steps = 4000;
    traj.seed = 42;
    traj.kind = SmoothedRandomWalk{0.2, 0.85};
    const Eigen::MatrixXd labels = gen_trajectory(traj);
    TuningModel tuning;
    tuning.preferred = lattice_preferred(bounds, 16, 42);
    tuning.kernel = TuningModel::Kernel::Linear;
    tuning.gain = 1.0;
    tuning.noise_sd = 0.05;
    tuning.history = 1;
    const Eigen::MatrixXd neural = gen_neural(labels, tuning, 42);

    PcaDecoder pca(bounds, 1);
    pca.fit(neural);
    const Metrics m = compute_metrics(explore(pca, neural, bounds), labels);
    for (double corr : m.correlation_per_axis) CHECK(std::abs(corr) > 0.5);

    // Orientation is drawn from the seed: another seed mirrors an axis.
    PcaDecoder other(bounds, 2);
    other.fit(neural);
    const Metrics mo = compute_metrics(explore(other, neural, bounds), labels);
    bool some_sign_differs = false;
    for (std::size_t a = 0; a < 2; ++a)
        if (m.correlation_per_axis[a] * mo.correlation_per_axis[a] < 0.0)
            some_sign_differs = true;
    CHECK(some_sign_differs);
}

TEST_CASE("self-reinforcement drives bits from disorder toward order") {
    const RunConfig base = reference_config(2);
    RunConfig cfg = base;
    cfg.grid.band = 0.2;
    const Dataset data = load_or_synthesize(cfg);
    auto decoder = make_decoder(cfg, data);
    LoopSettings settings = loop_settings(cfg);
    const RunResult ir = run_interaction(settings, data, *decoder);
    settings.epochs = 4;
    const RunResult sr = run_self_reinforcement(settings, data, *decoder, ir.model);

    const auto scores = order_score(sr);
    REQUIRE(scores.size() == 4);
    // Golden trend: mirrored exploration starts near 0.49, the first
    // retarget aligns it with exploitation, later epochs hold the plateau.
    CHECK(scores[0] == doctest::Approx(0.49013638577691176).epsilon(1e-9));
    for (std::size_t e = 1; e < scores.size(); ++e) {
        CHECK(scores[e] > scores[0] + 0.4);
        CHECK(scores[e] >= scores[e - 1] - 0.002);  // plateau wobble bound, golden run
    }
}
