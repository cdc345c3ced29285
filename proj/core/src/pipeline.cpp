#include "gridsd/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace gridsd {

namespace {

double rmse_all(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("rmse: shape mismatch");
    if (a.size() == 0) return 0.0;
    return std::sqrt((a - b).array().square().mean());
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

double axis_scale(const std::vector<double>& v, int axis, double fallback) {
    return v.empty() ? fallback : v[static_cast<std::size_t>(axis)];
}

struct AxisWalker {
    const Eigen::MatrixXd& neural;
    const std::vector<BitCode>& codes;
    const SpaceBounds& bounds;
    const GridParams& grid;
    RefitMode refit;
    const ExplorationDecoder* decoder;
    int axis;
    Eigen::MatrixXd& values;
    LocalCorrectResult& out;

    void descend(const std::vector<Eigen::Index>& rows, const Interval& interval, int level) {
        if (level > grid.depth || rows.empty()) return;
        const double cs = axis_scale(grid.center_scale, axis, 1.0);
        const double fs = axis_scale(grid.flip_scale, axis, 1.0);

        if (level > 1 && refit == RefitMode::Refit && decoder != nullptr &&
            static_cast<Eigen::Index>(rows.size()) >= decoder->min_local_samples()) {
            SpaceBounds local = bounds;
            local.axes[static_cast<std::size_t>(axis)] = interval;
            const Eigen::MatrixXd decoded = decoder->decode_local(gather_rows(neural, rows), local);
            for (std::size_t i = 0; i < rows.size(); ++i)
                values(rows[i], axis) = interval.clamp(decoded(static_cast<Eigen::Index>(i), axis));
        }

        const double mid = midline(interval, cs);
        std::vector<Eigen::Index> zero, one;
        for (Eigen::Index k : rows) {
            const auto& bits = codes[static_cast<std::size_t>(k)].bits[static_cast<std::size_t>(axis)];
            if (static_cast<int>(bits.size()) < level) continue;  // truncated axis
            const int want = bits[static_cast<std::size_t>(level - 1)];
            const double z = values(k, axis);
            const int got = encode_bit_interaction(z, interval, cs);
            ++out.compared[static_cast<std::size_t>(level - 1)];
            if (got != want) {
                ++out.mismatched[static_cast<std::size_t>(level - 1)];
                const double raw = z + 2.0 * fs * (mid - z);
                const double post = interval.clamp(raw);
                out.events.push_back({k, 0, axis, level, z, post, post != raw, {}});
                values(k, axis) = post;
            }
            (want ? one : zero).push_back(k);
        }
        descend(zero, child_bounds(interval, cs, 0), level + 1);
        descend(one, child_bounds(interval, cs, 1), level + 1);
    }
};

std::vector<Eigen::Index> all_rows(Eigen::Index n) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    return rows;
}

}  // namespace

Eigen::MatrixXd explore(const ExplorationDecoder& decoder, const Eigen::MatrixXd& neural,
                        const SpaceBounds& bounds) {
    Eigen::MatrixXd pred = decoder.predict(neural);
    if (static_cast<int>(pred.cols()) != bounds.dim())
        throw std::invalid_argument("explore: decoder dimension does not match bounds");
    for (Eigen::Index a = 0; a < pred.cols(); ++a) {
        const Interval& ax = bounds.axis(static_cast<int>(a));
        for (Eigen::Index k = 0; k < pred.rows(); ++k) pred(k, a) = ax.clamp(pred(k, a));
    }
    return pred;
}

std::vector<BitCode> interaction_codes(const Eigen::MatrixXd& labels, const SpaceBounds& bounds,
                                       const GridParams& params) {
    std::vector<BitCode> codes;
    codes.reserve(static_cast<std::size_t>(labels.rows()));
    std::vector<double> point(static_cast<std::size_t>(labels.cols()));
    for (Eigen::Index k = 0; k < labels.rows(); ++k) {
        for (Eigen::Index a = 0; a < labels.cols(); ++a) point[static_cast<std::size_t>(a)] = labels(k, a);
        codes.push_back(encode_position(point, bounds, params, EncodeMode::Interaction).code);
    }
    return codes;
}

SelfCodes self_codes_resolved(const Eigen::MatrixXd& z_hat, const Eigen::MatrixXd& z_true,
                              const SpaceBounds& bounds, const GridParams& params) {
    if (z_hat.rows() != z_true.rows() || z_hat.cols() != z_true.cols())
        throw std::invalid_argument("self_codes_resolved: shape mismatch");
    const int d = bounds.dim();

    SelfCodes out;
    out.codes.resize(static_cast<std::size_t>(z_hat.rows()));
    out.dropped.assign(static_cast<std::size_t>(z_hat.rows()), 0);
    for (Eigen::Index k = 0; k < z_hat.rows(); ++k) {
        BitCode& code = out.codes[static_cast<std::size_t>(k)];
        code.bits.resize(static_cast<std::size_t>(d));
        bool dropped = false;
        for (int a = 0; a < d && !dropped; ++a) {
            const double cs = axis_scale(params.center_scale, a, 1.0);
            Interval cur = bounds.axis(a);
            auto& bits = code.bits[static_cast<std::size_t>(a)];
            for (int level = 1; level <= params.depth; ++level) {
                const BitOutcome o =
                    encode_bit_self(z_hat(k, a), cur, cs, params.band, params.band_policy);
                int bit;
                if (is_bit(o)) {
                    bit = bit_value(o);
                } else if (o == BitOutcome::Deferred) {
                    bit = encode_bit_interaction(z_true(k, a), cur, cs);
                    ++out.deferred_events;
                } else {
                    dropped = true;
                    break;
                }
                bits.push_back(static_cast<std::uint8_t>(bit));
                cur = child_bounds(cur, cs, bit);
            }
        }
        if (dropped) {
            out.dropped[static_cast<std::size_t>(k)] = 1;
            ++out.dropped_samples;
        }
    }
    return out;
}

LocalCorrectResult local_correct(const Eigen::MatrixXd& predictions, const Eigen::MatrixXd& neural,
                                 const std::vector<BitCode>& external_codes,
                                 const SpaceBounds& bounds, const GridParams& params,
                                 RefitMode refit, const ExplorationDecoder* decoder) {
    if (static_cast<std::size_t>(predictions.rows()) != external_codes.size())
        throw std::invalid_argument("local_correct: one external code per sample required");
    if (refit == RefitMode::Refit && decoder == nullptr)
        throw std::invalid_argument("local_correct: refit requires a decoder");
    if (neural.rows() != predictions.rows() && refit == RefitMode::Refit)
        throw std::invalid_argument("local_correct: neural rows must match predictions");

    LocalCorrectResult out;
    out.corrected = predictions;
    for (int a = 0; a < bounds.dim(); ++a) {
        const Interval& ax = bounds.axis(a);
        for (Eigen::Index k = 0; k < out.corrected.rows(); ++k)
            out.corrected(k, a) = ax.clamp(out.corrected(k, a));
    }
    out.compared.assign(static_cast<std::size_t>(params.depth), 0);
    out.mismatched.assign(static_cast<std::size_t>(params.depth), 0);
    if (params.depth == 0 || predictions.rows() == 0) return out;

    const auto rows = all_rows(predictions.rows());
    for (int a = 0; a < bounds.dim(); ++a) {
        AxisWalker walker{neural, external_codes, bounds, params, refit, decoder, a,
                          out.corrected, out};
        walker.descend(rows, bounds.axis(a), 1);
    }
    return out;
}

namespace {

EpochMetrics epoch_metrics(const LocalCorrectResult& lc, const GridParams& grid) {
    EpochMetrics m;
    m.mismatch_rate.resize(static_cast<std::size_t>(grid.depth));
    for (int l = 0; l < grid.depth; ++l) {
        const auto idx = static_cast<std::size_t>(l);
        m.mismatch_rate[idx] =
            lc.compared[idx] > 0
                ? static_cast<double>(lc.mismatched[idx]) / static_cast<double>(lc.compared[idx])
                : 0.0;
    }
    return m;
}

void append_events(RunResult& result, const LocalCorrectResult& lc,
                   const std::vector<Eigen::Index>& row_map, const Eigen::MatrixXd& truth,
                   int epoch) {
    for (const CorrectionEvent& e : lc.events) {
        CorrectionEvent g = e;
        g.epoch = epoch;
        g.sample = row_map.empty() ? e.sample : row_map[static_cast<std::size_t>(e.sample)];
        g.true_pos.resize(static_cast<std::size_t>(truth.cols()));
        for (Eigen::Index a = 0; a < truth.cols(); ++a)
            g.true_pos[static_cast<std::size_t>(a)] = truth(g.sample, a);
        result.events.push_back(std::move(g));
    }
}

std::vector<Eigen::Index> included_rows(const LocalCorrectResult& lc, Eigen::Index count,
                                        const std::vector<Eigen::Index>& row_map) {
    std::vector<std::uint8_t> excluded(static_cast<std::size_t>(count), 0);
    for (const CorrectionEvent& e : lc.events)
        if (e.clamped) excluded[static_cast<std::size_t>(e.sample)] = 1;
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i)
        if (!excluded[static_cast<std::size_t>(i)])
            rows.push_back(row_map.empty() ? i : row_map[static_cast<std::size_t>(i)]);
    return rows;
}

void check_finite(const EpochMetrics& m, const char* where) {
    if (!std::isfinite(m.rmse_explore) || !std::isfinite(m.rmse_corrected) ||
        !std::isfinite(m.rmse_test))
        throw std::runtime_error(std::string(where) + ": non-finite loss, aborting");
}

}  // namespace

RunResult run_interaction(const LoopSettings& settings, const Dataset& data,
                          ExplorationDecoder& decoder) {
    settings.bounds.validate();
    settings.grid.validate(settings.bounds);
    data.validate(settings.bounds);
    if (settings.epochs < 1) throw std::invalid_argument("run_interaction: epochs must be >= 1");

    const SplitIndex split = make_split(data.size(), settings.train_fraction);
    const Eigen::MatrixXd train_neural = data.neural.topRows(split.train_count);
    const Eigen::MatrixXd train_labels = data.labels.topRows(split.train_count);
    const Eigen::MatrixXd test_neural = data.neural.bottomRows(split.test_count());
    const Eigen::MatrixXd test_labels = data.labels.bottomRows(split.test_count());

    if (!decoder.fitted()) decoder.fit(train_neural);
    const std::vector<BitCode> codes = interaction_codes(train_labels, settings.bounds, settings.grid);

    RunResult result;
    result.phase = "interaction";
    result.unsupervised = settings.grid.depth == 0;

    for (int epoch = 0; epoch < settings.epochs; ++epoch) {
        if (epoch > 0)  // close the loop: exploitation output pulls exploration
            decoder.retarget(train_neural, exploit_predict(result.model, train_neural));

        const Eigen::MatrixXd zbar = explore(decoder, train_neural, settings.bounds);
        LocalCorrectResult lc = local_correct(zbar, train_neural, codes, settings.bounds,
                                              settings.grid, settings.refit, &decoder);

        const std::vector<Eigen::Index> fit_rows = included_rows(lc, split.train_count, {});
        if (fit_rows.empty()) throw std::runtime_error("run_interaction: no trainable samples");
        result.model = exploit_train(gather_rows(train_neural, fit_rows),
                                     gather_rows(lc.corrected, fit_rows), settings.ridge);
        const Eigen::MatrixXd zhat_test = exploit_predict(result.model, test_neural);

        EpochMetrics m = epoch_metrics(lc, settings.grid);
        m.rmse_explore = rmse_all(zbar, train_labels);
        m.rmse_corrected = rmse_all(lc.corrected, train_labels);
        m.rmse_test = rmse_all(zhat_test, test_labels);
        m.trained = static_cast<Eigen::Index>(fit_rows.size());
        m.interaction_bits = static_cast<long long>(split.train_count) * settings.bounds.dim() *
                             settings.grid.depth;
        check_finite(m, "run_interaction");
        result.epochs.push_back(m);

        append_events(result, lc, {}, train_labels, epoch);
        result.explored = zbar;
        result.corrected = lc.corrected;
        result.test_predictions = zhat_test;
        result.trained_rows = fit_rows;
    }
    return result;
}

RunResult run_self_reinforcement(const LoopSettings& settings, const Dataset& data,
                                 ExplorationDecoder& decoder, const ExploitationModel& model) {
    settings.bounds.validate();
    settings.grid.validate(settings.bounds);
    data.validate(settings.bounds);
    if (!model.trained())
        throw StateError("run_self_reinforcement: needs the exploitation model of an interaction run");
    if (!decoder.fitted())
        throw StateError("run_self_reinforcement: needs a fitted exploration decoder");
    if (settings.epochs < 1)
        throw std::invalid_argument("run_self_reinforcement: epochs must be >= 1");

    const SplitIndex split = make_split(data.size(), settings.train_fraction);
    const Eigen::MatrixXd train_neural = data.neural.topRows(split.train_count);
    const Eigen::MatrixXd train_labels = data.labels.topRows(split.train_count);
    const Eigen::MatrixXd test_neural = data.neural.bottomRows(split.test_count());
    const Eigen::MatrixXd test_labels = data.labels.bottomRows(split.test_count());

    RunResult result;
    result.phase = "self";
    result.unsupervised = settings.grid.depth == 0;
    result.model = model;

    for (int epoch = 0; epoch < settings.epochs; ++epoch) {
        const Eigen::MatrixXd zbar = explore(decoder, train_neural, settings.bounds);
        const Eigen::MatrixXd zhat = exploit_predict(result.model, train_neural);
        const SelfCodes sc = self_codes_resolved(zhat, train_labels, settings.bounds, settings.grid);

        std::vector<Eigen::Index> active;
        active.reserve(static_cast<std::size_t>(split.train_count));
        for (Eigen::Index k = 0; k < split.train_count; ++k)
            if (!sc.dropped[static_cast<std::size_t>(k)]) active.push_back(k);

        std::vector<BitCode> active_codes;
        active_codes.reserve(active.size());
        for (Eigen::Index k : active) active_codes.push_back(sc.codes[static_cast<std::size_t>(k)]);

        const Eigen::MatrixXd active_neural = gather_rows(train_neural, active);
        LocalCorrectResult lc =
            local_correct(gather_rows(zbar, active), active_neural, active_codes, settings.bounds,
                          settings.grid, settings.refit, &decoder);

        Eigen::MatrixXd corrected = zbar;
        for (std::size_t i = 0; i < active.size(); ++i)
            corrected.row(active[i]) = lc.corrected.row(static_cast<Eigen::Index>(i));

        const std::vector<Eigen::Index> fit_rows =
            included_rows(lc, static_cast<Eigen::Index>(active.size()), active);
        if (!fit_rows.empty()) {
            result.model = exploit_train(gather_rows(train_neural, fit_rows),
                                         gather_rows(corrected, fit_rows), settings.ridge);
            decoder.retarget(gather_rows(train_neural, fit_rows),
                             exploit_predict(result.model, gather_rows(train_neural, fit_rows)));
        }
        const Eigen::MatrixXd zhat_test = exploit_predict(result.model, test_neural);

        EpochMetrics m = epoch_metrics(lc, settings.grid);
        m.rmse_explore = rmse_all(zbar, train_labels);
        m.rmse_corrected = rmse_all(corrected, train_labels);
        m.rmse_test = rmse_all(zhat_test, test_labels);
        m.dropped = sc.dropped_samples;
        m.deferred = static_cast<Eigen::Index>(sc.deferred_events);
        m.trained = static_cast<Eigen::Index>(fit_rows.size());
        m.interaction_bits = sc.deferred_events;
        check_finite(m, "run_self_reinforcement");
        result.epochs.push_back(m);

        append_events(result, lc, active, train_labels, epoch);
        result.explored = zbar;
        result.corrected = corrected;
        result.test_predictions = zhat_test;
        result.trained_rows = fit_rows;
    }
    return result;
}

UnitStepResult unit_step(const Eigen::RowVectorXd& window, int feedback_bit,
                         const std::function<double(const Eigen::RowVectorXd&)>& decode,
                         const Interval& axis, double center_scale, double flip_scale) {
    if (!decode) throw std::invalid_argument("unit_step: missing decode map");
    const double decoded = axis.clamp(decode(window));
    UnitStepResult out;
    out.forwarded = window;
    out.corrected_value = encode_bit_interaction(decoded, axis, center_scale) == feedback_bit
                              ? decoded
                              : correct_axis(decoded, axis, center_scale, flip_scale);
    out.bit_out = encode_bit_interaction(out.corrected_value, axis, center_scale);
    return out;
}

}  // namespace gridsd
