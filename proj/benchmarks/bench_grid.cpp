#include <benchmark/benchmark.h>

#include <random>

#include "gridsd/exploit.hpp"
#include "gridsd/grid.hpp"
#include "gridsd/pipeline.hpp"
#include "gridsd/synth.hpp"

using namespace gridsd;

namespace {

SpaceBounds bounds2d() { return make_bounds({0.0, 0.0}, {10.0, 10.0}); }

GridParams grid(int depth) {
    GridParams p;
    p.depth = depth;
    p.center_scale = {1.0, 1.0};
    p.flip_scale = {1.0, 1.0};
    return p;
}

void BM_EncodePosition(benchmark::State& state) {
    const auto bounds = bounds2d();
    const auto p = grid(static_cast<int>(state.range(0)));
    std::mt19937 gen(1);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<double> point{u(gen), u(gen)};
    for (auto _ : state) {
        point[0] = u(gen);
        point[1] = u(gen);
        benchmark::DoNotOptimize(encode_position(point, bounds, p));
    }
}
BENCHMARK(BM_EncodePosition)->Arg(4)->Arg(8)->Arg(16);

void BM_UpdateMultilevel(benchmark::State& state) {
    const auto bounds = bounds2d();
    const auto p = grid(static_cast<int>(state.range(0)));
    std::mt19937 gen(2);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (auto _ : state) {
        const std::vector<double> zp{u(gen), u(gen)};
        const std::vector<double> zt{u(gen), u(gen)};
        const BitCode cp = encode_position(zp, bounds, p).code;
        const BitCode ct = encode_position(zt, bounds, p).code;
        benchmark::DoNotOptimize(update_multilevel(zp, cp, ct, bounds, p));
    }
}
BENCHMARK(BM_UpdateMultilevel)->Arg(4)->Arg(8);

void BM_LocalCorrect(benchmark::State& state) {
    const auto bounds = bounds2d();
    const auto p = grid(static_cast<int>(state.range(0)));
    TrajectoryModel traj;
    traj.bounds = bounds;
    traj.steps = 2000;
    traj.seed = 3;
    const Eigen::MatrixXd labels = gen_trajectory(traj);
    const Eigen::MatrixXd preds = oracle_unsupervised(labels, bounds, {0, 1}, 0.5, 3);
    const auto codes = interaction_codes(labels, bounds, p);
    for (auto _ : state)
        benchmark::DoNotOptimize(local_correct(preds, preds, codes, bounds, p));
}
BENCHMARK(BM_LocalCorrect)->Arg(2)->Arg(4)->Arg(6);

void BM_RidgeTrain(benchmark::State& state) {
    TrajectoryModel traj;
    traj.bounds = bounds2d();
    traj.steps = 5000;
    traj.seed = 4;
    const Eigen::MatrixXd labels = gen_trajectory(traj);
    TuningModel tuning;
    tuning.preferred = lattice_preferred(traj.bounds, 20, 4);
    tuning.history = 3;
    tuning.noise_sd = 0.5;
    const Eigen::MatrixXd neural = gen_neural(labels, tuning, 4);
    for (auto _ : state) benchmark::DoNotOptimize(exploit_train(neural, labels, 1e-6));
}
BENCHMARK(BM_RidgeTrain);

}  // namespace

BENCHMARK_MAIN();
