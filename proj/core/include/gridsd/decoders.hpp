#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "gridsd/geometry.hpp"

namespace gridsd {

struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unsupervised map from neural windows to positions. Implementations must be
/// deterministic given their fitted state and input.
class ExplorationDecoder {
public:
    virtual ~ExplorationDecoder() = default;

    virtual void fit(const Eigen::MatrixXd& neural) = 0;
    virtual bool fitted() const = 0;

    /// Predict positions for each row. Throws StateError when unfitted.
    virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& neural) const = 0;

    /// Re-decode a routed subset inside a subspace, rescaled to its bounds.
    /// Used by the local method to replace the predictions that entered the
    /// subspace with values decoded from the subspace's own rows.
    virtual Eigen::MatrixXd decode_local(const Eigen::MatrixXd& neural,
                                         const SpaceBounds& local_bounds) const = 0;

    /// Minimum rows decode_local needs; smaller subspaces keep their values.
    virtual Eigen::Index min_local_samples() const = 0;

    /// Pull the decoder's output map toward the given targets (least-squares
    /// refit of the per-axis rescaling on the given rows).
    virtual void retarget(const Eigen::MatrixXd& neural, const Eigen::MatrixXd& targets) = 0;

    virtual std::unique_ptr<ExplorationDecoder> clone() const = 0;
};

/// Principal-subspace decoder: projects centered windows onto the top-d
/// principal directions and affinely rescales each score axis to the space
/// bounds. The sign of each direction is unobservable without supervision, so
/// it is drawn from the seed; a run may come out mirrored on any axis.
class PcaDecoder final : public ExplorationDecoder {
public:
    PcaDecoder(SpaceBounds bounds, std::uint64_t seed);

    void fit(const Eigen::MatrixXd& neural) override;
    bool fitted() const override { return fitted_; }
    Eigen::MatrixXd predict(const Eigen::MatrixXd& neural) const override;
    Eigen::MatrixXd decode_local(const Eigen::MatrixXd& neural,
                                 const SpaceBounds& local_bounds) const override;
    Eigen::Index min_local_samples() const override;
    void retarget(const Eigen::MatrixXd& neural, const Eigen::MatrixXd& targets) override;
    std::unique_ptr<ExplorationDecoder> clone() const override;

private:
    Eigen::MatrixXd scores(const Eigen::MatrixXd& neural) const;

    SpaceBounds bounds_;
    std::uint64_t seed_;
    bool fitted_ = false;
    Eigen::RowVectorXd mean_;
    Eigen::MatrixXd components_;  // (features x d), seeded signs
    Eigen::VectorXd scale_;       // per-axis affine rescale
    Eigen::VectorXd offset_;
};

/// Bench decoder that realizes the mirrored-trajectory phenomenon directly:
/// its "decoding" of a fitted row is the true position reflected about the
/// space center on the chosen axes, plus frozen Gaussian noise. Rows are
/// recognized by content, so it only decodes rows it was fitted on.
class OracleDecoder final : public ExplorationDecoder {
public:
    OracleDecoder(Eigen::MatrixXd labels, SpaceBounds bounds, std::vector<int> reflect_axes,
                  double noise_sd, std::uint64_t seed);

    void fit(const Eigen::MatrixXd& neural) override;
    bool fitted() const override { return fitted_; }
    Eigen::MatrixXd predict(const Eigen::MatrixXd& neural) const override;
    Eigen::MatrixXd decode_local(const Eigen::MatrixXd& neural,
                                 const SpaceBounds& local_bounds) const override;
    Eigen::Index min_local_samples() const override { return 1; }
    void retarget(const Eigen::MatrixXd& neural, const Eigen::MatrixXd& targets) override;
    std::unique_ptr<ExplorationDecoder> clone() const override;

private:
    Eigen::MatrixXd raw_predict(const Eigen::MatrixXd& neural) const;

    Eigen::MatrixXd labels_;
    SpaceBounds bounds_;
    std::vector<int> reflect_axes_;
    double noise_sd_;
    std::uint64_t seed_;
    bool fitted_ = false;
    Eigen::MatrixXd outputs_;  // reflected labels + frozen noise
    std::unordered_map<std::uint64_t, Eigen::Index> row_index_;
    Eigen::VectorXd scale_;  // retargetable affine post-map
    Eigen::VectorXd offset_;
};

}  // namespace gridsd
