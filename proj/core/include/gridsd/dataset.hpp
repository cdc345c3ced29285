#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "gridsd/geometry.hpp"

namespace gridsd {

/// Time-aligned neural windows with position labels. Row k holds the
/// flattened window (channels x history) and the d-dimensional position at
/// time k.
struct Dataset {
    Eigen::MatrixXd neural;  // K x (channels * history)
    Eigen::MatrixXd labels;  // K x d

    Eigen::Index size() const { return neural.rows(); }
    int dim() const { return static_cast<int>(labels.cols()); }

    void validate(const SpaceBounds& bounds) const {
        if (neural.rows() != labels.rows())
            throw std::invalid_argument("dataset: neural/label row counts differ");
        if (static_cast<int>(labels.cols()) != bounds.dim())
            throw std::invalid_argument("dataset: label dimension does not match bounds");
        if (!neural.allFinite() || !labels.allFinite())
            throw std::invalid_argument("dataset: non-finite entries");
    }
};

/// Contiguous train/test view: the first `split * K` rows train, the rest test.
struct SplitIndex {
    Eigen::Index train_count = 0;
    Eigen::Index total = 0;

    Eigen::Index test_count() const { return total - train_count; }
};

inline SplitIndex make_split(Eigen::Index total, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("split fraction must lie in (0, 1)");
    SplitIndex s;
    s.total = total;
    s.train_count = static_cast<Eigen::Index>(static_cast<double>(total) * train_fraction);
    if (s.train_count < 1 || s.train_count >= total)
        throw std::invalid_argument("split leaves an empty train or test set");
    return s;
}

}  // namespace gridsd
