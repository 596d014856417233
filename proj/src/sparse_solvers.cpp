#include "eqdisc/sparse_solvers.hpp"
#include "eqdisc/errors.hpp"

#include <cmath>

namespace eqdisc {

Eigen::VectorXd ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda2) {
    if (lambda2 < 0.0) throw config_error("ridge: lambda2 must be non-negative");
    const auto m = X.cols();
    Eigen::MatrixXd A = X.transpose() * X;
    A.diagonal().array() += lambda2;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    const Eigen::VectorXd b = X.transpose() * y;
    const Eigen::VectorXd w = ldlt.solve(b);
    if (lambda2 == 0.0) {
        // unpenalized normal equations are always consistent, so a residual
        // check cannot detect rank deficiency; inspect the factor instead
        const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
        if (ldlt.info() != Eigen::Success || !w.allFinite() ||
            (m > 0 && d.minCoeff() <= 1e-12 * std::max(1.0, d.maxCoeff())))
            throw pipeline_error("ridge: normal equations rank-deficient at lambda2=0");
    }
    (void)m;
    return w;
}

double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.cols() == 0) return 0.0;
    return (X.transpose() * y).cwiseAbs().maxCoeff();
}

SafeScreenResult safe_screen(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda) {
    const double lmax = lasso_lambda_max(X, y);
    if (lmax == 0.0) throw config_error("safe_screen: y orthogonal to all columns (lambda_max=0)");
    if (!(lambda > 0.0) || lambda > lmax)
        throw config_error("safe_screen: lambda must satisfy 0 < lambda <= lambda_max");
    SafeScreenResult res;
    res.lambda_max = lmax;
    const double ynorm = y.norm();
    const Eigen::VectorXd corr = (X.transpose() * y).cwiseAbs();
    for (int j = 0; j < X.cols(); ++j) {
        const double bound = lambda - X.col(j).norm() * ynorm * (lmax - lambda) / lmax;
        if (corr(j) < bound)
            res.discarded.push_back(j);
        else
            res.kept.push_back(j);
    }
    return res;
}

LassoFit lasso_cd_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double ynorm2,
                       double lambda, const Eigen::VectorXd& w0, double tol, int max_iter) {
    if (!(lambda > 0.0)) throw config_error("lasso_cd: lambda must be positive");
    const auto m = G.rows();
    LassoFit fit;
    fit.lambda = lambda;
    Eigen::VectorXd w = w0;
    Eigen::VectorXd q = G * w; // q = G w, maintained incrementally

    auto objective = [&](const Eigen::VectorXd& wv, const Eigen::VectorXd& qv) {
        return 0.5 * (ynorm2 - 2.0 * b.dot(wv) + wv.dot(qv)) + lambda * wv.lpNorm<1>();
    };

    int sweep = 0;
    for (; sweep < max_iter; ++sweep) {
        double max_update = 0.0, wmax = 1.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double gjj = G(j, j);
            if (gjj == 0.0) continue;
            const double c = b(j) - q(j) + gjj * w(j);
            const double a = std::abs(c) - lambda;
            const double wj = a > 0.0 ? (c > 0.0 ? a : -a) / gjj : 0.0;
            const double d = wj - w(j);
            if (d != 0.0) {
                q += G.col(j) * d;
                w(j) = wj;
            }
            max_update = std::max(max_update, std::abs(d));
            wmax = std::max(wmax, std::abs(wj));
        }
        if (max_update < tol * wmax) {
            fit.converged = true;
            ++sweep;
            break;
        }
    }
    fit.iterations = sweep;
    fit.weights = std::move(w);
    fit.objective = objective(fit.weights, G * fit.weights);
    return fit;
}

LassoFit lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, double tol,
                  int max_iter) {
    const Eigen::MatrixXd G = X.transpose() * X;
    const Eigen::VectorXd b = X.transpose() * y;
    return lasso_cd_gram(G, b, y.squaredNorm(), lambda, Eigen::VectorXd::Zero(X.cols()), tol,
                         max_iter);
}

std::vector<double> lambda_grid(double lambda_max, int points, double floor_ratio) {
    std::vector<double> grid(points);
    for (int k = 0; k < points; ++k)
        grid[k] = lambda_max * std::exp(std::log(floor_ratio) * k / (points - 1));
    return grid;
}

double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w, double lambda) {
    const Eigen::VectorXd corr = X.transpose() * (y - X * w);
    double v = 0.0;
    for (int j = 0; j < X.cols(); ++j) {
        if (w(j) != 0.0)
            v = std::max(v, std::abs(corr(j) - lambda * (w(j) > 0.0 ? 1.0 : -1.0)));
        else
            v = std::max(v, std::max(std::abs(corr(j)) - lambda, 0.0));
    }
    return v;
}

} // namespace eqdisc
