#include "gridsd/exploit.hpp"

#include <Eigen/Dense>
#include <iostream>
#include <stdexcept>

namespace gridsd {

ExploitationModel exploit_train(const Eigen::MatrixXd& neural, const Eigen::MatrixXd& labels,
                                double ridge) {
    if (neural.rows() != labels.rows())
        throw std::invalid_argument("exploit_train: row count mismatch");
    if (neural.rows() == 0) throw std::invalid_argument("exploit_train: empty training set");
    if (ridge < 0.0) throw std::invalid_argument("exploit_train: negative ridge");

    ExploitationModel model;
    model.ridge = ridge;

    const Eigen::RowVectorXd ymean = labels.colwise().mean();
    if (neural.cols() == 0) {
        model.weights.resize(0, labels.cols());
        model.bias = ymean;
        return model;
    }

    const Eigen::RowVectorXd xmean = neural.colwise().mean();
    const Eigen::MatrixXd xc = neural.rowwise() - xmean;
    const Eigen::MatrixXd yc = labels.rowwise() - ymean;
    const Eigen::MatrixXd gram = xc.transpose() * xc;
    const Eigen::MatrixXd rhs = xc.transpose() * yc;
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(gram.rows(), gram.cols());

    double r = ridge;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::LDLT<Eigen::MatrixXd> solver(gram + r * id);
        if (solver.info() == Eigen::Success) {
            Eigen::MatrixXd w = solver.solve(rhs);
            if (w.allFinite()) {
                model.weights = std::move(w);
                model.bias = ymean - xmean * model.weights;
                model.ridge = r;
                return model;
            }
        }
        r = r > 0.0 ? r * 10.0 : 1e-10;
        std::cerr << "exploit_train: near-singular normal equations, raising ridge to " << r
                  << "\n";
    }
    throw std::runtime_error("exploit_train: normal equations unsolvable");
}

Eigen::MatrixXd exploit_predict(const ExploitationModel& model, const Eigen::MatrixXd& neural) {
    if (!model.trained()) throw std::invalid_argument("exploit_predict: untrained model");
    if (model.weights.rows() == 0)
        return model.bias.replicate(neural.rows(), 1);
    return (neural * model.weights).rowwise() + model.bias;
}

}  // namespace gridsd
