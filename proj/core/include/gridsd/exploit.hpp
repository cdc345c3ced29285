#pragma once

#include <Eigen/Core>

namespace gridsd {

/// Regularized linear map from neural windows to positions.
struct ExploitationModel {
    Eigen::MatrixXd weights;  // features x d
    Eigen::RowVectorXd bias;  // 1 x d
    double ridge = 1e-6;

    bool trained() const { return bias.size() > 0; }
};

/// Ridge least-squares fit on centered data; the intercept is unpenalized.
/// Near-singular normal equations escalate the ridge (with a warning on
/// stderr) until the solve succeeds.
ExploitationModel exploit_train(const Eigen::MatrixXd& neural, const Eigen::MatrixXd& labels,
                                double ridge);

Eigen::MatrixXd exploit_predict(const ExploitationModel& model, const Eigen::MatrixXd& neural);

}  // namespace gridsd
