#pragma once

#include "eqdisc/dual_lasso.hpp"
#include "eqdisc/featurelib.hpp"

#include <Eigen/Dense>
#include <vector>

namespace eqdisc {

struct StridgeConfig {
    double lambda0 = 1.0;
    double decay = 0.5;
    int max_rounds = 20;
    double tau_rel = 1e-4; // relative scale-magnitude threshold per round
};

struct StridgeFit {
    Eigen::VectorXd weights; // length m, zero outside the active set
    std::vector<int> active; // sorted
};

// Sequentially thresholded ridge regression with scale-based thresholding.
// Columns are normalized internally; the penalty schedule starts at
// lambda0 * kappa2 (condition number of the normalized design) and halves per
// round, but thresholding only engages once the penalty has decayed to
// lambda0 — at larger penalties ridge shrinkage drags genuinely small terms
// under any relative threshold. After the decay rounds the threshold/refit
// step is repeated at the final penalty (1e-8) until the active set is
// stable. Returns zero weights and an empty set when everything thresholds
// away (a valid outcome).
StridgeFit stridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const StridgeConfig& cfg, const FeatureLibrary& library);

// Fit all n targets of a trajectory independently over one library.
SparseLinearModel fit_stridge(const StateTrajectory& traj, const FeatureLibrary& library,
                              const StridgeConfig& cfg = {});

} // namespace eqdisc
