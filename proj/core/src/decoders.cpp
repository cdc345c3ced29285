#include "gridsd/decoders.hpp"

#include <Eigen/Dense>
#include <cstring>

#include "gridsd/rng.hpp"

namespace gridsd {

namespace {

// Per-axis least-squares fit of target = a * value + b.
void fit_affine(const Eigen::MatrixXd& values, const Eigen::MatrixXd& targets,
                Eigen::VectorXd& scale, Eigen::VectorXd& offset) {
    const Eigen::Index d = values.cols();
    for (Eigen::Index a = 0; a < d; ++a) {
        const auto v = values.col(a);
        const auto t = targets.col(a);
        const double vm = v.mean();
        const double tm = t.mean();
        const double var = (v.array() - vm).square().sum();
        const double cov = ((v.array() - vm) * (t.array() - tm)).sum();
        const double sl = var > 0.0 ? cov / var : 0.0;
        scale(a) = sl;
        offset(a) = tm - sl * vm;
    }
}

std::uint64_t hash_row(const Eigen::MatrixXd& m, Eigen::Index row) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        std::uint64_t bits;
        const double v = m(row, c);
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// PcaDecoder

PcaDecoder::PcaDecoder(SpaceBounds bounds, std::uint64_t seed)
    : bounds_(std::move(bounds)), seed_(seed) {
    bounds_.validate();
}

void PcaDecoder::fit(const Eigen::MatrixXd& neural) {
    const Eigen::Index d = bounds_.dim();
    if (neural.rows() < 2) throw std::invalid_argument("PcaDecoder: need at least two rows");
    if (neural.cols() < d)
        throw std::invalid_argument("PcaDecoder: fewer features than space dimensions");

    mean_ = neural.colwise().mean();
    const Eigen::MatrixXd centered = neural.rowwise() - mean_;
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(neural.rows() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("PcaDecoder: eigendecomposition failed");

    // Eigenvalues ascend; take the last d columns, largest first.
    components_.resize(neural.cols(), d);
    for (Eigen::Index a = 0; a < d; ++a)
        components_.col(a) = eig.eigenvectors().col(neural.cols() - 1 - a);

    // Fix the arbitrary eigenvector sign deterministically, then flip each
    // axis by a seeded coin: orientation is unobservable without labels.
    Rng rng = substream(seed_, "decoder");
    for (Eigen::Index a = 0; a < d; ++a) {
        Eigen::Index imax = 0;
        components_.col(a).cwiseAbs().maxCoeff(&imax);
        if (components_(imax, a) < 0.0) components_.col(a) = -components_.col(a);
        if (rng.uniform01() < 0.5) components_.col(a) = -components_.col(a);
    }

    const Eigen::MatrixXd s = centered * components_;
    scale_.resize(d);
    offset_.resize(d);
    for (Eigen::Index a = 0; a < d; ++a) {
        const double smin = s.col(a).minCoeff();
        const double smax = s.col(a).maxCoeff();
        const Interval& ax = bounds_.axis(static_cast<int>(a));
        if (smax > smin) {
            scale_(a) = ax.width() / (smax - smin);
            offset_(a) = ax.lo - smin * scale_(a);
        } else {
            scale_(a) = 0.0;
            offset_(a) = ax.center();
        }
    }
    fitted_ = true;
}

Eigen::MatrixXd PcaDecoder::scores(const Eigen::MatrixXd& neural) const {
    return (neural.rowwise() - mean_) * components_;
}

Eigen::MatrixXd PcaDecoder::predict(const Eigen::MatrixXd& neural) const {
    if (!fitted_) throw StateError("PcaDecoder: predict before fit");
    Eigen::MatrixXd out = scores(neural);
    for (Eigen::Index a = 0; a < out.cols(); ++a)
        out.col(a) = out.col(a) * scale_(a) + Eigen::VectorXd::Constant(out.rows(), offset_(a));
    return out;
}

Eigen::MatrixXd PcaDecoder::decode_local(const Eigen::MatrixXd& neural,
                                         const SpaceBounds& local_bounds) const {
    if (!fitted_) throw StateError("PcaDecoder: decode_local before fit");
    PcaDecoder sub(local_bounds, seed_);
    sub.fit(neural);
    return sub.predict(neural);
}

Eigen::Index PcaDecoder::min_local_samples() const {
    return std::max<Eigen::Index>(4, bounds_.dim() + 2);
}

void PcaDecoder::retarget(const Eigen::MatrixXd& neural, const Eigen::MatrixXd& targets) {
    if (!fitted_) throw StateError("PcaDecoder: retarget before fit");
    if (neural.rows() == 0) return;
    fit_affine(scores(neural), targets, scale_, offset_);
}

std::unique_ptr<ExplorationDecoder> PcaDecoder::clone() const {
    return std::make_unique<PcaDecoder>(*this);
}

// ---------------------------------------------------------------------------
// OracleDecoder

OracleDecoder::OracleDecoder(Eigen::MatrixXd labels, SpaceBounds bounds,
                             std::vector<int> reflect_axes, double noise_sd, std::uint64_t seed)
    : labels_(std::move(labels)),
      bounds_(std::move(bounds)),
      reflect_axes_(std::move(reflect_axes)),
      noise_sd_(noise_sd),
      seed_(seed) {
    if (noise_sd_ < 0.0) throw std::invalid_argument("OracleDecoder: negative noise");
    bounds_.validate();
    for (int a : reflect_axes_)
        if (a < 0 || a >= bounds_.dim())
            throw std::invalid_argument("OracleDecoder: reflect axis out of range");
}

void OracleDecoder::fit(const Eigen::MatrixXd& neural) {
    if (neural.rows() != labels_.rows())
        throw std::invalid_argument("OracleDecoder: fit rows do not match labels");
    const Eigen::Index d = labels_.cols();

    outputs_ = labels_;
    for (int a : reflect_axes_) {
        const double c = bounds_.axis(a).center();
        outputs_.col(a) = (2.0 * c - outputs_.col(a).array()).matrix();
    }
    Rng rng = substream(seed_, "oracle_noise");
    if (noise_sd_ > 0.0) {
        for (Eigen::Index k = 0; k < outputs_.rows(); ++k)
            for (Eigen::Index a = 0; a < d; ++a) outputs_(k, a) += rng.normal(0.0, noise_sd_);
    }

    row_index_.clear();
    row_index_.reserve(static_cast<std::size_t>(neural.rows()));
    for (Eigen::Index k = 0; k < neural.rows(); ++k) row_index_.emplace(hash_row(neural, k), k);

    scale_ = Eigen::VectorXd::Ones(d);
    offset_ = Eigen::VectorXd::Zero(d);
    fitted_ = true;
}

Eigen::MatrixXd OracleDecoder::raw_predict(const Eigen::MatrixXd& neural) const {
    Eigen::MatrixXd out(neural.rows(), labels_.cols());
    for (Eigen::Index k = 0; k < neural.rows(); ++k) {
        const auto it = row_index_.find(hash_row(neural, k));
        if (it == row_index_.end())
            throw StateError("OracleDecoder: row was not part of the fitted data");
        out.row(k) = outputs_.row(it->second);
    }
    return out;
}

Eigen::MatrixXd OracleDecoder::predict(const Eigen::MatrixXd& neural) const {
    if (!fitted_) throw StateError("OracleDecoder: predict before fit");
    Eigen::MatrixXd out = raw_predict(neural);
    for (Eigen::Index a = 0; a < out.cols(); ++a)
        out.col(a) = out.col(a) * scale_(a) + Eigen::VectorXd::Constant(out.rows(), offset_(a));
    return out;
}

Eigen::MatrixXd OracleDecoder::decode_local(const Eigen::MatrixXd& neural,
                                            const SpaceBounds& local_bounds) const {
    Eigen::MatrixXd out = predict(neural);
    for (Eigen::Index a = 0; a < out.cols(); ++a) {
        const Interval& ax = local_bounds.axis(static_cast<int>(a));
        for (Eigen::Index k = 0; k < out.rows(); ++k) out(k, a) = ax.clamp(out(k, a));
    }
    return out;
}

void OracleDecoder::retarget(const Eigen::MatrixXd& neural, const Eigen::MatrixXd& targets) {
    if (!fitted_) throw StateError("OracleDecoder: retarget before fit");
    if (neural.rows() == 0) return;
    fit_affine(raw_predict(neural), targets, scale_, offset_);
}

std::unique_ptr<ExplorationDecoder> OracleDecoder::clone() const {
    return std::make_unique<OracleDecoder>(*this);
}

}  // namespace gridsd
