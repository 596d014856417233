#include "eqdisc/dual_lasso.hpp"
#include "eqdisc/errors.hpp"
#include "eqdisc/sparse_solvers.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace eqdisc {

DualPoint dual_from_primal(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& primal_weights) {
    return DualPoint{y - X * primal_weights};
}

std::vector<int> dual_active_set(const Eigen::MatrixXd& X, const DualPoint& dual, double lambda,
                                 double eps_active) {
    const Eigen::VectorXd corr = (X.transpose() * dual.theta).cwiseAbs();
    std::vector<int> active;
    for (int j = 0; j < X.cols(); ++j)
        if (corr(j) >= lambda * (1.0 - eps_active)) active.push_back(j);
    return active;
}

namespace {

// Near-exact least squares on a column subset of the unit-norm Gram; the tiny
// diagonal shift only guards against duplicated columns.
std::pair<Eigen::VectorXd, double> solve_rss(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                                             double ynorm2, const std::vector<int>& subset) {
    const int k = static_cast<int>(subset.size());
    Eigen::MatrixXd A(k, k);
    Eigen::VectorXd rhs(k);
    for (int r = 0; r < k; ++r) {
        rhs(r) = b(subset[r]);
        for (int c = 0; c < k; ++c) A(r, c) = G(subset[r], subset[c]);
    }
    A.diagonal().array() += 1e-12;
    Eigen::VectorXd w = A.ldlt().solve(rhs);
    double rss = std::max(ynorm2 - rhs.dot(w), 0.0);
    return {std::move(w), rss};
}

// Greedy forward selection inside the candidate pool followed by backward
// elimination; works entirely on the cached Gram data.
std::vector<int> forward_backward(const Eigen::MatrixXd& G, const Eigen::VectorXd& b,
                                  double ynorm2, std::vector<int> remaining,
                                  const DualLassoOptions& opts) {
    constexpr double kRssFloor = 1e-22;
    std::vector<int> sel;
    double rss = ynorm2;
    std::sort(remaining.begin(), remaining.end());
    while (!remaining.empty() && static_cast<int>(sel.size()) < opts.max_terms) {
        double best_rss = std::numeric_limits<double>::infinity();
        size_t best_pos = 0;
        for (size_t i = 0; i < remaining.size(); ++i) {
            sel.push_back(remaining[i]);
            const double r = solve_rss(G, b, ynorm2, sel).second;
            sel.pop_back();
            if (r < best_rss) {
                best_rss = r;
                best_pos = i;
            }
        }
        if (!sel.empty() && best_rss > opts.gain_forward * rss) break;
        sel.push_back(remaining[best_pos]);
        remaining.erase(remaining.begin() + best_pos);
        rss = best_rss;
        if (rss <= kRssFloor * ynorm2) break;
    }
    // drop any term whose removal keeps the residual within drop_factor
    bool changed = true;
    while (changed && sel.size() > 1) {
        changed = false;
        rss = solve_rss(G, b, ynorm2, sel).second;
        double best_rss = std::numeric_limits<double>::infinity();
        int victim = -1;
        for (int j : sel) {
            std::vector<int> rest;
            for (int k2 : sel)
                if (k2 != j) rest.push_back(k2);
            const double r = solve_rss(G, b, ynorm2, rest).second;
            if (r <= std::max(opts.drop_factor * rss, kRssFloor * ynorm2) && r < best_rss) {
                best_rss = r;
                victim = j;
            }
        }
        if (victim >= 0) {
            sel.erase(std::find(sel.begin(), sel.end(), victim));
            changed = true;
        }
    }
    std::sort(sel.begin(), sel.end());
    return sel;
}

// Cyclic coordinate descent on the unit-norm Gram, skipping SAFE-discarded
// columns. Returns false when max_iter sweeps did not converge.
bool cd_masked(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double lambda,
               const std::vector<char>& keep, Eigen::VectorXd& w, double tol, int max_iter) {
    const auto m = G.rows();
    for (Eigen::Index j = 0; j < m; ++j)
        if (!keep[j]) w(j) = 0.0;
    Eigen::VectorXd q = G * w;
    for (int sweep = 0; sweep < max_iter; ++sweep) {
        double max_update = 0.0, wmax = 1.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (!keep[j]) continue;
            const double c = b(j) - q(j) + w(j); // unit-norm columns: G(j,j) = 1
            const double a = std::abs(c) - lambda;
            const double wj = a > 0.0 ? (c > 0.0 ? a : -a) : 0.0;
            const double d = wj - w(j);
            if (d != 0.0) {
                q += G.col(j) * d;
                w(j) = wj;
            }
            max_update = std::max(max_update, std::abs(d));
            wmax = std::max(wmax, std::abs(wj));
        }
        if (max_update < tol * wmax) return true;
    }
    return false;
}

struct TargetFit {
    std::vector<int> support;
    Eigen::VectorXd weights_raw; // aligned with support
    double lambda = 0.0;
    double rss = 0.0;
};

TargetFit fit_target(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double ynorm2,
                     const Eigen::VectorXd& norms, const FeatureLibrary& library,
                     const DualLassoOptions& opts, double lambda2, int T, int target) {
    TargetFit out;
    if (ynorm2 == 0.0) return out;
    const double lmax = b.cwiseAbs().maxCoeff();
    if (lmax == 0.0) return out;

    std::vector<double> grid =
        opts.lambda > 0.0 ? std::vector<double>{opts.lambda} : lambda_grid(lmax);

    const int m = static_cast<int>(G.rows());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m); // warm-started down the grid
    const double ynorm = std::sqrt(ynorm2);

    double best_bic = std::numeric_limits<double>::infinity();
    for (double lam : grid) {
        if (lam > lmax) continue;
        // SAFE screen: unit-norm columns make the bound uniform across j
        const double safe_bound = lam - ynorm * (lmax - lam) / lmax;
        std::vector<char> keep_mask(m, 1);
        for (int j = 0; j < m; ++j)
            if (std::abs(b(j)) < safe_bound) keep_mask[j] = 0;

        // non-convergence at the grid floor is tolerable: the approximate
        // weights only seed the candidate pool below
        cd_masked(G, b, lam, keep_mask, w, 1e-12, 200000);

        // dual correlations |X^T theta| = |b - G w|; KKT-saturated columns
        // form the core active set, a relaxed cut forms the selection pool
        const Eigen::VectorXd corr = (b - G * w).cwiseAbs();
        std::vector<int> pool;
        for (int j = 0; j < m; ++j)
            if (corr(j) >= lam * opts.pool_ratio) pool.push_back(j);
        if (pool.empty()) continue;

        std::vector<int> sel = forward_backward(G, b, ynorm2, pool, opts);
        if (sel.empty()) continue;

        // scale-magnitude thresholding of the selection
        const Eigen::VectorXd ws = solve_rss(G, b, ynorm2, sel).first;
        double max_mag = 0.0;
        std::vector<double> mags(sel.size());
        for (size_t i = 0; i < sel.size(); ++i) {
            mags[i] = scale_magnitude(library, sel[i], ws(i) / norms(sel[i]));
            max_mag = std::max(max_mag, mags[i]);
        }
        std::vector<int> kept;
        for (size_t i = 0; i < sel.size(); ++i)
            if (mags[i] >= opts.tau_select * max_mag) kept.push_back(sel[i]);
        if (kept.empty()) continue;

        const auto [wk, rss] = solve_rss(G, b, ynorm2, kept);
        const double bic =
            T * std::log(std::max(rss, 1e-300) / T) + kept.size() * std::log(double(T));
        if (bic < best_bic - 1e-9) {
            best_bic = bic;
            out.support = kept;
            out.lambda = lam;
            out.rss = rss;
        }
    }

    if (!out.support.empty()) {
        // final ridge refit at lambda2 on the raw (unnormalized) columns
        const int k = static_cast<int>(out.support.size());
        Eigen::MatrixXd A(k, k);
        Eigen::VectorXd rhs(k);
        for (int r = 0; r < k; ++r) {
            rhs(r) = norms(out.support[r]) * b(out.support[r]);
            for (int c = 0; c < k; ++c)
                A(r, c) = norms(out.support[r]) * norms(out.support[c]) *
                          G(out.support[r], out.support[c]);
        }
        Eigen::MatrixXd Areg = A;
        Areg.diagonal().array() += lambda2;
        out.weights_raw = Areg.ldlt().solve(rhs);
        out.rss = std::max(
            ynorm2 - 2.0 * out.weights_raw.dot(rhs) + out.weights_raw.dot(A * out.weights_raw),
            0.0);
    }
    return out;
}

struct NormalizedDesign {
    Eigen::MatrixXd G; // unit-norm Gram
    Eigen::MatrixXd B; // m x n, unit-norm correlations per target
    Eigen::VectorXd norms;
    Eigen::VectorXd ynorm2; // per target
};

NormalizedDesign normalize(const DesignMatrix& dm, const Eigen::MatrixXd& targets) {
    NormalizedDesign nd;
    nd.norms = dm.column_norms.cwiseMax(1e-300);
    const Eigen::MatrixXd Xn = dm.values * nd.norms.cwiseInverse().asDiagonal();
    nd.G = Xn.transpose() * Xn;
    nd.B = Xn.transpose() * targets;
    nd.ynorm2 = targets.colwise().squaredNorm();
    return nd;
}

} // namespace

SparseLinearModel fit_dual_lasso(const StateTrajectory& traj, const FeatureLibrary& library,
                                 const DualLassoOptions& opts) {
    const DesignMatrix dm = evaluate(library, traj.states);
    const int n = traj.dimension();
    const int T = traj.samples();
    const double lambda2 = opts.lambda2 >= 0.0 ? opts.lambda2 : 1e-6 * T;
    const NormalizedDesign nd = normalize(dm, traj.derivatives);

    SparseLinearModel model;
    model.library = dm.library;
    model.library.scales = estimate_scales(traj.states);
    model.weights = Eigen::MatrixXd::Zero(library.size(), n);
    model.active.resize(n);
    model.lambda2 = lambda2;

    FeatureLibrary scaled_lib = model.library; // scale magnitudes need real scales
    double rss_total = 0.0, lambda_sum = 0.0;
    int lambda_count = 0;
    for (int t = 0; t < n; ++t) {
        const TargetFit fit = fit_target(nd.G, nd.B.col(t), nd.ynorm2(t), nd.norms, scaled_lib,
                                         opts, lambda2, T, t);
        model.active[t] = fit.support;
        for (size_t i = 0; i < fit.support.size(); ++i)
            model.weights(fit.support[i], t) = fit.weights_raw(i);
        rss_total += fit.rss;
        if (!fit.support.empty()) {
            lambda_sum += fit.lambda;
            ++lambda_count;
        }
    }
    model.lambda = lambda_count > 0 ? lambda_sum / lambda_count : 0.0;
    model.residual_fro = std::sqrt(rss_total);
    return model;
}

SparseLinearModel fit_lasso(const StateTrajectory& traj, const FeatureLibrary& library,
                            double lambda) {
    const DesignMatrix dm = evaluate(library, traj.states);
    const int n = traj.dimension();
    const int T = traj.samples();
    const int m = library.size();
    const NormalizedDesign nd = normalize(dm, traj.derivatives);

    SparseLinearModel model;
    model.library = dm.library;
    model.library.scales = estimate_scales(traj.states);
    model.weights = Eigen::MatrixXd::Zero(m, n);
    model.active.resize(n);
    model.lambda2 = 0.0;

    double rss_total = 0.0, lambda_sum = 0.0;
    int lambda_count = 0;
    for (int t = 0; t < n; ++t) {
        const Eigen::VectorXd b = nd.B.col(t);
        const double ynorm2 = nd.ynorm2(t);
        if (ynorm2 == 0.0) continue;
        const double lmax = b.cwiseAbs().maxCoeff();
        if (lmax == 0.0) continue;
        const double lam = lambda > 0.0 ? lambda : lmax * 1e-4; // grid floor rule

        const double safe_bound = lam - std::sqrt(ynorm2) * (lmax - lam) / lmax;
        std::vector<char> keep_mask(m, 1);
        for (int j = 0; j < m; ++j)
            if (std::abs(b(j)) < safe_bound) keep_mask[j] = 0;

        Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
        cd_masked(nd.G, b, lam, keep_mask, w, 1e-12, 200000);

        for (int j = 0; j < m; ++j) {
            if (w(j) == 0.0) continue;
            model.weights(j, t) = w(j) / nd.norms(j);
            model.active[t].push_back(j);
        }
        rss_total += std::max(ynorm2 - 2.0 * b.dot(w) + w.dot(nd.G * w), 0.0);
        lambda_sum += lam;
        ++lambda_count;
    }
    model.lambda = lambda_count > 0 ? lambda_sum / lambda_count : 0.0;
    model.residual_fro = std::sqrt(rss_total);
    return model;
}

std::string model_to_json(const SparseLinearModel& model) {
    nlohmann::json j;
    j["basis"] = model.library.basis == Basis::monomial ? "monomial" : "legendre";
    j["n"] = model.library.n;
    j["scales"] = std::vector<double>(model.library.scales.data(),
                                      model.library.scales.data() + model.library.n);
    j["lambda"] = model.lambda;
    j["lambda2"] = model.lambda2;
    j["residual"] = model.residual_fro;
    nlohmann::json eqs = nlohmann::json::array();
    for (int t = 0; t < static_cast<int>(model.weights.cols()); ++t) {
        nlohmann::json eq;
        eq["target"] = "x" + std::to_string(t + 1);
        nlohmann::json terms = nlohmann::json::array();
        for (int jcol : model.active[t]) {
            nlohmann::json term;
            term["index"] = model.library.descriptors[jcol];
            term["coef"] = model.weights(jcol, t);
            terms.push_back(term);
        }
        eq["terms"] = terms;
        eqs.push_back(eq);
    }
    j["equations"] = eqs;
    return j.dump(2);
}

SparseLinearModel model_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("model JSON: ") + e.what());
    }
    SparseLinearModel model;
    model.library.n = j.at("n").get<int>();
    model.library.basis =
        j.at("basis").get<std::string>() == "legendre" ? Basis::legendre : Basis::monomial;
    const auto scales = j.at("scales").get<std::vector<double>>();
    model.library.scales = Eigen::Map<const Eigen::VectorXd>(scales.data(), scales.size());
    model.lambda = j.at("lambda").get<double>();
    model.lambda2 = j.at("lambda2").get<double>();
    model.residual_fro = j.at("residual").get<double>();

    // library descriptors = union of referenced terms, in order of appearance
    std::vector<std::pair<MultiIndex, double>> flat;
    const auto& eqs = j.at("equations");
    const int n = static_cast<int>(eqs.size());
    std::vector<std::vector<std::pair<int, double>>> per_target(n);
    for (int t = 0; t < n; ++t) {
        for (const auto& term : eqs[t].at("terms")) {
            MultiIndex mi = term.at("index").get<MultiIndex>();
            auto it = std::find(model.library.descriptors.begin(),
                                model.library.descriptors.end(), mi);
            int col;
            if (it == model.library.descriptors.end()) {
                col = model.library.size();
                model.library.descriptors.push_back(mi);
            } else {
                col = static_cast<int>(it - model.library.descriptors.begin());
            }
            per_target[t].emplace_back(col, term.at("coef").get<double>());
        }
    }
    model.weights = Eigen::MatrixXd::Zero(model.library.size(), n);
    model.active.resize(n);
    for (int t = 0; t < n; ++t) {
        for (const auto& [col, coef] : per_target[t]) {
            model.weights(col, t) = coef;
            model.active[t].push_back(col);
        }
        std::sort(model.active[t].begin(), model.active[t].end());
    }
    return model;
}

} // namespace eqdisc
