#include "eqdisc/adaptive_growth.hpp"
#include "eqdisc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace eqdisc {

std::vector<MultiIndex> candidate_stream(int n, int max_degree) {
    return enumerate_legendre(n, max_degree).descriptors;
}

namespace {

struct LossFit {
    double loss = 0.0;
    Eigen::MatrixXd weights;
};

// Joint Frobenius loss over all targets, each fitted by STRidge on the shared
// library columns.
LossFit joint_loss(const Eigen::MatrixXd& cols, const Eigen::MatrixXd& targets,
                   const FeatureLibrary& library, const StridgeConfig& scfg) {
    LossFit out;
    const int n = static_cast<int>(targets.cols());
    if (cols.cols() == 0) {
        out.loss = targets.squaredNorm();
        out.weights.resize(0, n);
        return out;
    }
    out.weights.resize(cols.cols(), n);
    for (int t = 0; t < n; ++t)
        out.weights.col(t) = stridge_fit(cols, targets.col(t), scfg, library).weights;
    out.loss = (targets - cols * out.weights).squaredNorm();
    return out;
}

FeatureLibrary make_library(int n, const std::vector<MultiIndex>& descriptors,
                            const Eigen::VectorXd& scales) {
    FeatureLibrary lib;
    lib.n = n;
    lib.basis = Basis::legendre;
    lib.descriptors = descriptors;
    lib.scales = scales;
    return lib;
}

Eigen::MatrixXd drop_column(const Eigen::MatrixXd& M, int j) {
    Eigen::MatrixXd out(M.rows(), M.cols() - 1);
    out.leftCols(j) = M.leftCols(j);
    out.rightCols(M.cols() - 1 - j) = M.rightCols(M.cols() - 1 - j);
    return out;
}

} // namespace

std::pair<SparseLinearModel, GrowthTrace> grow(const StateTrajectory& traj,
                                               const GrowthConfig& cfg,
                                               const StridgeConfig& stridge_cfg) {
    const int n = traj.dimension();
    const Eigen::VectorXd scales = estimate_scales(traj.states);
    const std::vector<MultiIndex> candidates = candidate_stream(n, cfg.max_degree);
    const int n_candidates = static_cast<int>(candidates.size());
    const int stall_limit = cfg.stall_limit > 0 ? cfg.stall_limit : 2 * n * cfg.max_degree;

    std::vector<MultiIndex> lib_idx;
    Eigen::MatrixXd cols(traj.samples(), 0);
    double loss = std::numeric_limits<double>::infinity();

    GrowthTrace trace;
    int step = 0, additions = 0, stall = 0, cursor = 0, already_present = 0;

    auto removal_sweep = [&]() {
        int j = 0;
        while (j < static_cast<int>(lib_idx.size())) {
            std::vector<MultiIndex> rest = lib_idx;
            rest.erase(rest.begin() + j);
            const Eigen::MatrixXd rest_cols = drop_column(cols, j);
            const LossFit lf =
                joint_loss(rest_cols, traj.derivatives, make_library(n, rest, scales), stridge_cfg);
            if (lf.loss <= cfg.r_r * loss) {
                trace.steps.push_back({step, "removed", lib_idx[j], loss, lf.loss});
                lib_idx = std::move(rest);
                cols = rest_cols;
                loss = lf.loss;
                stall = 0;
            } else {
                ++j;
            }
        }
    };

    // cycle the candidate stream until the gates stall or the library saturates
    while (stall < stall_limit && static_cast<int>(lib_idx.size()) < cfg.max_features) {
        const MultiIndex& mi = candidates[cursor];
        cursor = (cursor + 1) % n_candidates;
        if (std::find(lib_idx.begin(), lib_idx.end(), mi) != lib_idx.end()) {
            if (++already_present >= n_candidates) break; // whole library present
            continue;
        }
        already_present = 0;
        ++step;

        std::vector<MultiIndex> tentative = lib_idx;
        tentative.push_back(mi);
        Eigen::MatrixXd tentative_cols(cols.rows(), cols.cols() + 1);
        tentative_cols.leftCols(cols.cols()) = cols;
        tentative_cols.rightCols(1) = evaluate_column({Basis::legendre, mi}, traj.states);

        const LossFit lf = joint_loss(tentative_cols, traj.derivatives,
                                      make_library(n, tentative, scales), stridge_cfg);
        const bool accept = std::isinf(loss) ? std::isfinite(lf.loss) : lf.loss <= cfg.r_a * loss;
        if (accept) {
            trace.steps.push_back({step, "added", mi, loss, lf.loss});
            lib_idx = std::move(tentative);
            cols = std::move(tentative_cols);
            loss = lf.loss;
            stall = 0;
            if (++additions % cfg.k_r == 0) removal_sweep();
        } else {
            trace.steps.push_back({step, "rejected", mi, loss, lf.loss});
            ++stall;
        }
    }
    removal_sweep();

    if (lib_idx.empty()) throw pipeline_error("adaptive growth: no model found (empty library)");

    const FeatureLibrary library = make_library(n, lib_idx, scales);
    const LossFit lf = joint_loss(cols, traj.derivatives, library, stridge_cfg);

    SparseLinearModel model;
    model.library = library;
    model.weights = lf.weights;
    model.active.resize(n);
    for (int t = 0; t < n; ++t)
        for (int j = 0; j < static_cast<int>(lib_idx.size()); ++j)
            if (model.weights(j, t) != 0.0) model.active[t].push_back(j);
    model.lambda = cfg.lambda0;
    model.lambda2 = 0.0;
    model.residual_fro = std::sqrt(lf.loss);
    return {std::move(model), std::move(trace)};
}

void write_trace_csv(const GrowthTrace& trace, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot open for writing: " + path);
    f << "step,action,descriptor,loss_before,loss_after\n";
    for (const auto& s : trace.steps) {
        f << s.step << "," << s.action << ",\"(";
        for (size_t i = 0; i < s.descriptor.size(); ++i) {
            if (i) f << " ";
            f << s.descriptor[i];
        }
        f << ")\"," << s.loss_before << "," << s.loss_after << "\n";
    }
}

} // namespace eqdisc
