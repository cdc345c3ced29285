#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gridsd/analysis.hpp"
#include "gridsd/synth.hpp"
#include "helpers.hpp"

using namespace gridsd;
using testutil::box2d;
using testutil::params;

namespace {

std::vector<CorrectionEvent> events_at(const Eigen::MatrixXd& positions) {
    std::vector<CorrectionEvent> events;
    for (Eigen::Index k = 0; k < positions.rows(); ++k) {
        CorrectionEvent e;
        e.sample = k;
        e.level = 1;
        for (Eigen::Index a = 0; a < positions.cols(); ++a) e.true_pos.push_back(positions(k, a));
        events.push_back(std::move(e));
    }
    return events;
}

Eigen::MatrixXd uniform_points(Eigen::Index n, std::mt19937& gen) {
    std::uniform_real_distribution<double> u(0.0, 10.0);
    Eigen::MatrixXd pts(n, 2);
    for (Eigen::Index k = 0; k < n; ++k) {
        pts(k, 0) = u(gen);
        pts(k, 1) = u(gen);
    }
    return pts;
}

}  // namespace

TEST_CASE("metric definitions") {
    Eigen::MatrixXd truth(4, 2);
    truth << 1, 2, 3, 4, 5, 6, 7, 8;

    const Metrics exact = compute_metrics(truth, truth);
    CHECK(exact.rmse == 0.0);
    CHECK(exact.correlation_per_axis[0] == doctest::Approx(1.0));

    Eigen::MatrixXd shifted = truth.array() + 2.5;
    const Metrics off = compute_metrics(shifted, truth);
    CHECK(off.rmse == doctest::Approx(2.5));
    CHECK(off.rmse_per_axis[0] == doctest::Approx(2.5));
    CHECK(off.correlation_per_axis[0] == doctest::Approx(1.0));
    CHECK(off.correlation_per_axis[1] == doctest::Approx(1.0));

    Eigen::MatrixXd reflected = truth;
    reflected.col(0) = (10.0 - truth.col(0).array()).matrix();
    const Metrics mirror = compute_metrics(reflected, truth);
    CHECK(mirror.correlation_per_axis[0] == doctest::Approx(-1.0));
    CHECK(mirror.correlation_per_axis[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(compute_metrics(Eigen::MatrixXd(0, 2), Eigen::MatrixXd(0, 2)),
                    std::invalid_argument);
}

TEST_CASE("rate map normalizes events by occupancy") {
    std::mt19937 gen(61);
    const Eigen::MatrixXd samples = uniform_points(20000, gen);
    const auto bounds = box2d();

    const RateMap empty = correction_rate_map({}, samples, bounds, 8);
    CHECK(empty.event_counts.maxCoeff() == 0.0);
    CHECK(empty.rate.maxCoeff() == 0.0);  // every visited cell has zero rate

    // Events at every sample give rate one wherever anyone was.
    const RateMap ones = correction_rate_map(events_at(samples), samples, bounds, 8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            if (ones.sample_counts(i, j) > 0) CHECK(ones.rate(i, j) == doctest::Approx(1.0));

    // Unvisited cells report no rate at all.
    Eigen::MatrixXd corner(1, 2);
    corner << 0.1, 0.1;
    const RateMap sparse = correction_rate_map({}, corner, bounds, 8);
    CHECK(std::isnan(sparse.rate(7, 7)));
    CHECK(sparse.rate(0, 0) == 0.0);
}

TEST_CASE("boundary affinity of a uniform subsample is one") {
    std::mt19937 gen(67);
    const Eigen::MatrixXd samples = uniform_points(100000, gen);
    Eigen::MatrixXd every_tenth(samples.rows() / 10, 2);
    for (Eigen::Index k = 0; k < every_tenth.rows(); ++k) every_tenth.row(k) = samples.row(10 * k);
    const auto bounds = box2d();
    const auto p = params(3, 2);

    const BoundaryAffinity ba =
        boundary_affinity(events_at(every_tenth), samples, bounds, p, 0.2);
    REQUIRE(ba.ratio.has_value());
    CHECK(*ba.ratio == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("no events means no affinity ratio") {
    std::mt19937 gen(71);
    const Eigen::MatrixXd samples = uniform_points(1000, gen);
    const BoundaryAffinity ba = boundary_affinity({}, samples, box2d(), params(3, 2), 0.2);
    CHECK_FALSE(ba.ratio.has_value());
    CHECK(ba.event_fraction == 0.0);
}

TEST_CASE("noisy predictions misfire against the reference lines") {
    // Brute-force expectation for the node clustering: with true positions z
    // and predictions z + e, a level can only disagree when z sits within
    // roughly |e| of that level's line, so mismatch events pile up near the
    // lines. Simulated straight-line here, independently of local_correct;
    // at noise 0.5 and a 0.2 band over depth 3 the expected ratio is 1.24.
    std::mt19937 gen(73);
    std::normal_distribution<double> noise(0.0, 0.5);
    const auto bounds = box2d();
    const auto p = params(3, 2);
    const Eigen::MatrixXd samples = uniform_points(50000, gen);

    std::vector<CorrectionEvent> events;
    for (Eigen::Index k = 0; k < samples.rows(); ++k) {
        for (int a = 0; a < 2; ++a) {
            const double z = samples(k, a);
            double v = bounds.axis(a).clamp(z + noise(gen));
            Interval cur = bounds.axis(a);
            for (int level = 1; level <= 3; ++level) {
                const double mid = cur.center();
                const int want = z >= mid ? 1 : 0;
                if ((v >= mid ? 1 : 0) != want) {
                    CorrectionEvent e;
                    e.sample = k;
                    e.axis = a;
                    e.level = level;
                    e.true_pos = {samples(k, 0), samples(k, 1)};
                    events.push_back(std::move(e));
                    v = cur.clamp(2.0 * mid - v);
                }
                cur = want ? Interval{mid, cur.hi} : Interval{cur.lo, mid};
            }
        }
    }

    const BoundaryAffinity ba = boundary_affinity(events, samples, bounds, p, 0.2);
    REQUIRE(ba.ratio.has_value());
    CHECK(*ba.ratio > 1.1);   // clustering is real
    CHECK(*ba.ratio < 1.40);  // and sits at the simulated expectation, not above
}

TEST_CASE("depth selection balances accuracy against code length") {
    SweepTable table;
    table.dim = 2;
    const std::vector<double> rmse{5.0, 1.2, 0.6, 0.35, 0.30, 0.29, 0.288};
    for (int n = 0; n <= 6; ++n)
        table.rows.push_back({n, rmse[static_cast<std::size_t>(n)], {}, 0, 0.0, ""});

    CHECK(select_n(table, 0.0) == 6);         // pure accuracy
    CHECK(select_n(table, 1000.0) == 0);      // complexity dominates
    CHECK(select_n(table, 0.05) == 3);        // interior optimum
    CHECK_THROWS_AS(select_n(SweepTable{}, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(select_n(table, -1.0), std::invalid_argument);
}

TEST_CASE("ties in the selection score break toward the smaller depth") {
    SweepTable table;
    table.dim = 1;
    table.rows.push_back({0, 1.0, {}, 0, 0.0, ""});
    table.rows.push_back({1, 1.0, {}, 0, 0.0, ""});
    table.rows.push_back({2, 1.0, {}, 0, 0.0, ""});
    CHECK(select_n(table, 0.0) == 0);
}

TEST_CASE("selection is invariant under increasing score transforms") {
    std::mt19937 gen(79);
    std::uniform_real_distribution<double> u(0.05, 6.0);
    std::uniform_real_distribution<double> g(0.0, 0.4);
    const auto transforms = std::vector<std::function<double(double)>>{
        [](double s) { return 3.0 * s + 11.0; },
        [](double s) { return std::atan(s); },
        [](double s) { return std::cbrt(s); },
        [](double s) { return std::exp(s / 10.0); },
    };
    for (int trial = 0; trial < 100; ++trial) {
        SweepTable table;
        table.dim = 2;
        std::vector<double> scores;
        const double gamma = g(gen);
        for (int n = 0; n <= 6; ++n) {
            const double rmse = u(gen);
            table.rows.push_back({n, rmse, {}, 0, 0.0, ""});
            scores.push_back(-rmse - gamma * 2 * n);
        }
        const int chosen = select_n(table, gamma);
        const std::size_t direct = argmax_score(scores);
        CHECK(chosen == table.rows[direct].depth);
        for (const auto& f : transforms) {
            std::vector<double> warped;
            for (double s : scores) warped.push_back(f(s));
            CHECK(argmax_score(warped) == direct);
        }
    }
}

TEST_CASE("order score summarizes bit agreement") {
    RunResult r;
    EpochMetrics perfect;
    perfect.mismatch_rate = {0.0, 0.0, 0.0};
    EpochMetrics broken;
    broken.mismatch_rate = {1.0, 1.0, 1.0};
    EpochMetrics half;
    half.mismatch_rate = {0.5, 0.25};
    r.epochs = {perfect, broken, half};
    const auto scores = order_score(r);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0] == doctest::Approx(1.0));
    CHECK(scores[1] == doctest::Approx(0.0));
    CHECK(scores[2] == doctest::Approx(0.625));
}

namespace {

Dataset sweep_dataset(Eigen::Index samples, std::uint64_t seed) {
    TrajectoryModel traj;
    traj.bounds = box2d();
    traj.steps = samples;
    traj.seed = seed;
    traj.kind = SmoothedRandomWalk{0.35, 0.7};
    Dataset data;
    data.labels = gen_trajectory(traj);
    TuningModel tuning;
    tuning.preferred = lattice_preferred(traj.bounds, 6, seed);
    tuning.kernel = TuningModel::Kernel::Linear;
    tuning.baseline = 0.5;
    data.neural = gen_neural(data.labels, tuning, seed);
    return data;
}

}  // namespace

TEST_CASE("depth sweep walks the accuracy curve and reproduces bit for bit") {
    const Dataset data = sweep_dataset(600, 83);
    LoopSettings s;
    s.bounds = box2d();
    s.grid = params(0, 2);
    s.ridge = 1e-8;

    const auto decoder_factory = [&] {
        auto dec = std::make_unique<OracleDecoder>(data.labels.topRows(420), s.bounds,
                                                   std::vector<int>{0, 1}, 0.0,
                                                   static_cast<std::uint64_t>(31));
        dec->fit(data.neural.topRows(420));
        return std::unique_ptr<ExplorationDecoder>(std::move(dec));
    };

    const std::vector<int> depths{0, 1, 2, 3, 4, 5};
    const SweepTable a = sweep_n(s, data, decoder_factory, depths);
    const SweepTable b = sweep_n(s, data, decoder_factory, depths);

    REQUIRE(a.rows.size() == depths.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        REQUIRE(a.rows[i].ok());
        CHECK(a.rows[i].test_rmse == b.rows[i].test_rmse);  // bit-exact reruns
    }
    // Reflected zero-noise exploration: depth zero is far off, one level of
    // correction recovers the truth, deeper levels sit on the same floor.
    CHECK(a.rows[0].test_rmse > 1.0);
    CHECK(a.rows[1].test_rmse < 0.05);
    for (std::size_t i = 2; i < a.rows.size(); ++i)
        CHECK(a.rows[i].test_rmse <= a.rows[i - 1].test_rmse + 1e-9);
    // Interaction cost grows with depth.
    CHECK(a.rows[2].interaction_bits == 420 * 2 * 2);
}

TEST_CASE("a failing sweep row records its error and the sweep continues") {
    const Dataset data = sweep_dataset(300, 89);
    LoopSettings s;
    s.bounds = box2d();
    s.grid = params(0, 2, 0.8);  // off-center split: deep levels lose the line
    s.ridge = 1e-8;

    const auto decoder_factory = [&] {
        auto dec = std::make_unique<OracleDecoder>(data.labels.topRows(210), s.bounds,
                                                   std::vector<int>{}, 0.0,
                                                   static_cast<std::uint64_t>(37));
        dec->fit(data.neural.topRows(210));
        return std::unique_ptr<ExplorationDecoder>(std::move(dec));
    };

    const SweepTable table = sweep_n(s, data, decoder_factory, {0, 2, 6});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].ok());
    CHECK(table.rows[1].ok());
    CHECK_FALSE(table.rows[2].ok());  // the line escapes a deep subinterval
    CHECK(!table.rows[2].error.empty());
}
