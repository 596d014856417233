#include "eqdisc/stridge.hpp"
#include "eqdisc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace eqdisc {

namespace {

constexpr double kLambdaFinal = 1e-8;
constexpr double kKappaCap = 1e12;

struct GramData {
    Eigen::MatrixXd G; // unit-norm Gram
    Eigen::VectorXd b;
    Eigen::VectorXd norms;
    bool orthonormal = false; // raw Gram within 1e-10 of identity
    double kappa = 1.0;
};

GramData build_gram(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    GramData gd;
    gd.norms = X.colwise().norm().cwiseMax(1e-300);
    const Eigen::MatrixXd Xn = X * gd.norms.cwiseInverse().asDiagonal();
    gd.G = Xn.transpose() * Xn;
    gd.b = Xn.transpose() * y;

    Eigen::MatrixXd raw_gram = X.transpose() * X;
    raw_gram.diagonal().array() -= 1.0;
    gd.orthonormal = raw_gram.cwiseAbs().maxCoeff() < 1e-10;

    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gd.G)
                                   .eigenvalues()
                                   .cwiseMax(0.0);
    const double emin = ev(0), emax = ev(ev.size() - 1);
    gd.kappa = emin > 0.0 ? std::min(std::sqrt(emax / emin), kKappaCap) : kKappaCap;
    return gd;
}

Eigen::VectorXd ridge_on_subset(const GramData& gd, const std::vector<int>& active, double lam) {
    const int k = static_cast<int>(active.size());
    if (gd.orthonormal) {
        // analytic shortcut for orthonormal designs: w = (1+lambda)^-1 X^T y
        Eigen::VectorXd w(k);
        for (int i = 0; i < k; ++i) w(i) = gd.b(active[i]) / (1.0 + lam);
        return w;
    }
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd rhs(k);
    for (int r = 0; r < k; ++r) {
        rhs(r) = gd.b(active[r]);
        for (int c = 0; c < k; ++c) A(r, c) = gd.G(active[r], active[c]);
    }
    A.diagonal().array() += lam;
    return A.ldlt().solve(rhs);
}

// One threshold pass; returns the surviving subset of `active`.
std::vector<int> threshold(const GramData& gd, const std::vector<int>& active,
                           const Eigen::VectorXd& w, const FeatureLibrary& library,
                           double tau_rel) {
    double max_mag = 0.0;
    std::vector<double> mags(active.size());
    for (size_t i = 0; i < active.size(); ++i) {
        mags[i] = scale_magnitude(library, active[i], w(i) / gd.norms(active[i]));
        max_mag = std::max(max_mag, mags[i]);
    }
    std::vector<int> keep;
    if (max_mag <= 0.0) return keep;
    for (size_t i = 0; i < active.size(); ++i)
        if (mags[i] >= tau_rel * max_mag) keep.push_back(active[i]);
    return keep;
}

} // namespace

StridgeFit stridge_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const StridgeConfig& cfg, const FeatureLibrary& library) {
    if (X.cols() < 1) throw config_error("stridge_fit: design needs at least one column");
    const int m = static_cast<int>(X.cols());
    const GramData gd = build_gram(X, y);

    StridgeFit fit;
    fit.weights = Eigen::VectorXd::Zero(m);

    // Decay the penalty from lambda0*kappa, but fast-forward past the rounds
    // above lambda0 before thresholding: there ridge shrinkage drags true
    // small-scale terms below any relative cut.
    double lam = cfg.lambda0 * gd.kappa;
    const int skip =
        std::max(0, static_cast<int>(std::ceil(std::log(std::max(gd.kappa, 1.0)) /
                                               std::log(1.0 / cfg.decay))));
    lam *= std::pow(cfg.decay, skip);

    std::vector<int> active(m);
    for (int j = 0; j < m; ++j) active[j] = j;

    for (int round = 0; round < cfg.max_rounds; ++round) {
        const Eigen::VectorXd w = ridge_on_subset(gd, active, lam);
        std::vector<int> keep = threshold(gd, active, w, library, cfg.tau_rel);
        if (keep.empty()) return fit; // everything thresholded away: valid outcome
        active = std::move(keep);
        lam *= cfg.decay;
    }

    // converge the threshold at the final (near-OLS) penalty
    for (int i = 0; i < m; ++i) {
        const Eigen::VectorXd w = ridge_on_subset(gd, active, kLambdaFinal);
        std::vector<int> keep = threshold(gd, active, w, library, cfg.tau_rel);
        if (keep.empty()) return fit;
        if (keep == active) break;
        active = std::move(keep);
    }

    const Eigen::VectorXd w = ridge_on_subset(gd, active, kLambdaFinal);
    for (size_t i = 0; i < active.size(); ++i)
        fit.weights(active[i]) = w(i) / gd.norms(active[i]);
    fit.active = active;
    return fit;
}

SparseLinearModel fit_stridge(const StateTrajectory& traj, const FeatureLibrary& library,
                              const StridgeConfig& cfg) {
    const DesignMatrix dm = evaluate(library, traj.states);
    const int n = traj.dimension();

    SparseLinearModel model;
    model.library = dm.library;
    model.library.scales = estimate_scales(traj.states);
    model.weights = Eigen::MatrixXd::Zero(library.size(), n);
    model.active.resize(n);
    model.lambda = cfg.lambda0;
    model.lambda2 = kLambdaFinal;

    for (int t = 0; t < n; ++t) {
        const StridgeFit fit =
            stridge_fit(dm.values, traj.derivatives.col(t), cfg, model.library);
        model.weights.col(t) = fit.weights;
        model.active[t] = fit.active;
    }
    model.residual_fro = (traj.derivatives - dm.values * model.weights).norm();
    return model;
}

} // namespace eqdisc
