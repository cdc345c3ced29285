#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "gridsd/exploit.hpp"
#include "gridsd/grid.hpp"
#include "gridsd/pipeline.hpp"
#include "gridsd/synth.hpp"
#include "helpers.hpp"

using namespace gridsd;
using testutil::box2d;
using testutil::params;

namespace {

TrajectoryModel walk_model(Eigen::Index steps, std::uint64_t seed, double step_sd = 0.35,
                           double smoothing = 0.7) {
    TrajectoryModel m;
    m.bounds = box2d();
    m.steps = steps;
    m.seed = seed;
    m.kind = SmoothedRandomWalk{step_sd, smoothing};
    return m;
}

}  // namespace

TEST_CASE("trajectories stay inside the bounds and are seed-deterministic") {
    const auto model = walk_model(5000, 7);
    const Eigen::MatrixXd a = gen_trajectory(model);
    const Eigen::MatrixXd b = gen_trajectory(model);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 10.0);

    auto other = model;
    other.seed = 8;
    CHECK((gen_trajectory(other) - a).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("zero step size pins the walk to its start") {
    const auto model = walk_model(50, 3, 0.0);
    const Eigen::MatrixXd traj = gen_trajectory(model);
    for (Eigen::Index k = 0; k < traj.rows(); ++k) {
        CHECK(traj(k, 0) == 5.0);
        CHECK(traj(k, 1) == 5.0);
    }
}

TEST_CASE("lissajous curves span the bounds without leaving them") {
    TrajectoryModel m;
    m.bounds = box2d();
    m.steps = 2000;
    m.kind = Lissajous{{3.0, 2.0}, {0.0, M_PI / 3.0}};
    const Eigen::MatrixXd traj = gen_trajectory(m);
    CHECK(traj.minCoeff() >= 0.0);
    CHECK(traj.maxCoeff() <= 10.0);
    CHECK(traj.col(0).maxCoeff() > 9.9);  // the curve actually reaches the walls
    CHECK(traj.col(0).minCoeff() < 0.1);
    CHECK_THROWS_AS(gen_trajectory(TrajectoryModel{Lissajous{{1.0}, {}}, box2d(), 10, 0}),
                    std::invalid_argument);
}

TEST_CASE("a long walk covers nearly every depth-3 cell") {
    const Eigen::MatrixXd traj = gen_trajectory(walk_model(10000, 7));
    const auto bounds = box2d();
    const auto p = params(3, 2);
    std::set<std::vector<std::uint8_t>> visited;
    for (Eigen::Index k = 0; k < traj.rows(); ++k) {
        const BitCode code = encode_position({traj(k, 0), traj(k, 1)}, bounds, p).code;
        std::vector<std::uint8_t> key = code.bits[0];
        key.insert(key.end(), code.bits[1].begin(), code.bits[1].end());
        visited.insert(std::move(key));
    }
    // 64 cells at depth 3; occupancy oracle demands at least 95% of them.
    CHECK(static_cast<double>(visited.size()) >= 0.95 * 64.0);
}

TEST_CASE("noiseless linear tuning is exactly linearly decodable") {
    const Eigen::MatrixXd traj = gen_trajectory(walk_model(600, 11));
    TuningModel tuning;
    tuning.preferred = lattice_preferred(box2d(), 8, 11);
    tuning.kernel = TuningModel::Kernel::Linear;
    tuning.noise_sd = 0.0;
    tuning.history = 2;
    const Eigen::MatrixXd neural = gen_neural(traj, tuning, 11);
    CHECK(neural.rows() == 600);
    CHECK(neural.cols() == 16);

    const ExploitationModel model = exploit_train(neural, traj, 1e-10);
    const Eigen::MatrixXd pred = exploit_predict(model, neural);
    CHECK(std::sqrt((pred - traj).array().square().mean()) < 1e-6);
}

TEST_CASE("zero gain leaves nothing to decode") {
    const Eigen::MatrixXd traj = gen_trajectory(walk_model(2000, 13));
    TuningModel tuning;
    tuning.preferred = lattice_preferred(box2d(), 8, 13);
    tuning.kernel = TuningModel::Kernel::Gaussian;
    tuning.gain = 0.0;
    tuning.baseline = 1.0;
    tuning.noise_sd = 0.5;
    const Eigen::MatrixXd neural = gen_neural(traj, tuning, 13);

    const Eigen::Index train = 1400;
    const ExploitationModel model =
        exploit_train(neural.topRows(train), traj.topRows(train), 1e-4);
    const Eigen::MatrixXd pred = exploit_predict(model, neural.bottomRows(2000 - train));
    const Eigen::MatrixXd truth = traj.bottomRows(2000 - train);
    for (Eigen::Index a = 0; a < 2; ++a) {
        const Eigen::ArrayXd pc = pred.col(a).array() - pred.col(a).mean();
        const Eigen::ArrayXd tc = truth.col(a).array() - truth.col(a).mean();
        const double denom = std::sqrt(pc.square().sum() * tc.square().sum());
        const double corr = denom > 0.0 ? (pc * tc).sum() / denom : 0.0;
        CHECK(std::abs(corr) < 0.2);  // chance level
    }
}

TEST_CASE("oracle reflection examples") {
    Eigen::MatrixXd traj(1, 2);
    traj << 3.0, 4.0;
    const auto bounds = box2d();
    const Eigen::MatrixXd reflected = oracle_unsupervised(traj, bounds, {0}, 0.0, 1);
    CHECK(reflected(0, 0) == doctest::Approx(7.0));
    CHECK(reflected(0, 1) == doctest::Approx(4.0));
    const Eigen::MatrixXd identity = oracle_unsupervised(traj, bounds, {}, 0.0, 1);
    CHECK(identity(0, 0) == 3.0);
    CHECK(identity(0, 1) == 4.0);
}

TEST_CASE("noise-free reflection is an involution") {
    const Eigen::MatrixXd traj = gen_trajectory(walk_model(300, 17));
    const auto bounds = box2d();
    const Eigen::MatrixXd once = oracle_unsupervised(traj, bounds, {0, 1}, 0.0, 1);
    const Eigen::MatrixXd twice = oracle_unsupervised(once, bounds, {0, 1}, 0.0, 1);
    CHECK((twice - traj).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-level correction undoes a clean double reflection") {
    const Eigen::MatrixXd traj = gen_trajectory(walk_model(300, 19));
    const auto bounds = box2d();
    const auto p = params(1, 2);
    const Eigen::MatrixXd reflected = oracle_unsupervised(traj, bounds, {0, 1}, 0.0, 1);
    const auto codes = interaction_codes(traj, bounds, p);
    const auto r = local_correct(reflected, reflected, codes, bounds, p);
    CHECK((r.corrected - traj).cwiseAbs().maxCoeff() < 1e-9);
}
