#pragma once

#include "eqdisc/dynamics.hpp"
#include "eqdisc/featurelib.hpp"

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace eqdisc {

struct DualPoint {
    Eigen::VectorXd theta; // y - Xw; unique across primal solutions
};

struct SparseLinearModel {
    FeatureLibrary library;
    Eigen::MatrixXd weights;              // m x n
    std::vector<std::vector<int>> active; // per target, sorted
    double lambda = 0.0;
    double lambda2 = 0.0;
    double residual_fro = 0.0; // ||Xdot - X W||_F
};

DualPoint dual_from_primal(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& primal_weights);

// KKT-saturated columns: j active iff |X_j^T theta| >= lambda*(1 - eps_active).
std::vector<int> dual_active_set(const Eigen::MatrixXd& X, const DualPoint& dual, double lambda,
                                 double eps_active = 1e-3);

struct DualLassoOptions {
    double lambda = 0.0;     // <= 0: search the default geometric grid
    double lambda2 = -1.0;   // < 0: default 1e-6 * T
    double eps_active = 1e-3;

    // Selection stage (see fit_dual_lasso): candidate pool keeps columns with
    // dual correlation >= pool_ratio*lambda; greedy forward step accepts while
    // it shrinks the residual to at most gain_forward of the current one;
    // backward step drops a term if the refit stays within drop_factor of the
    // current residual; survivors below tau_select of the largest scale
    // magnitude are discarded before the final refit.
    double pool_ratio = 0.5;
    double gain_forward = 0.9;
    double drop_factor = 10.0;
    double tau_select = 0.02;
    int max_terms = 10;
};

// Dual-LASSO selection, per target: (1) SAFE screen, (2) LASSO on normalized
// columns, (3) dual point, (4) KKT-saturated candidate pool, (5) greedy
// forward-backward subset selection inside the pool, scale-magnitude
// thresholding, and a ridge refit at lambda2 on the surviving columns. With
// no fixed lambda the grid candidate minimizing BIC is returned.
SparseLinearModel fit_dual_lasso(const StateTrajectory& traj, const FeatureLibrary& library,
                                 const DualLassoOptions& opts = {});

// Plain LASSO baseline: SAFE screen + coordinate descent at a single lambda
// (default: the grid floor lambda_max*1e-4), no selection stage.
SparseLinearModel fit_lasso(const StateTrajectory& traj, const FeatureLibrary& library,
                            double lambda = 0.0);

std::string model_to_json(const SparseLinearModel& model);
SparseLinearModel model_from_json(const std::string& json_text);

} // namespace eqdisc
