#pragma once

#include <Eigen/Dense>
#include <vector>

namespace eqdisc {

struct LassoFit {
    Eigen::VectorXd weights;
    double lambda = 0.0;
    int iterations = 0; // full cyclic sweeps
    bool converged = false;
    double objective = 0.0; // 0.5*||y - Xw||^2 + lambda*||w||_1
};

struct SafeScreenResult {
    std::vector<int> kept;      // sorted
    std::vector<int> discarded; // sorted
    double lambda_max = 0.0;
};

// Solves (X^T X + lambda2 I) w = X^T y via LDLT. lambda2 = 0 requires a
// numerically nonsingular normal matrix (throws pipeline_error otherwise).
Eigen::VectorXd ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda2);

// ||X^T y||_inf: the LASSO solution is exactly zero for every lambda >= this.
double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Basic SAFE test: discard column j iff
//   |X_j^T y| < lambda - ||X_j|| ||y|| (lambda_max - lambda)/lambda_max.
// Every discarded feature has weight zero in every LASSO solution at lambda.
// Requires 0 < lambda <= lambda_max (throws config_error otherwise).
SafeScreenResult safe_screen(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda);

// Cyclic coordinate descent with exact soft-threshold updates for
//   min_w 0.5*||y - Xw||^2 + lambda*||w||_1.
// Converged when the largest single-coordinate update in a sweep is below
// tol * max(1, ||w||_inf). Columns are used as given (no internal scaling).
LassoFit lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                  double tol = 1e-10, int max_iter = 100000);

// Same solver on precomputed Gram data: G = X^T X, b = X^T y, ynorm2 = y^T y.
// w0 is the warm start. Used by the lambda-grid pipelines where one Gram is
// shared across dozens of solves.
LassoFit lasso_cd_gram(const Eigen::MatrixXd& G, const Eigen::VectorXd& b, double ynorm2,
                       double lambda, const Eigen::VectorXd& w0, double tol = 1e-10,
                       int max_iter = 100000);

// Geometric grid from lambda_max down to lambda_max*floor_ratio.
std::vector<double> lambda_grid(double lambda_max, int points = 50, double floor_ratio = 1e-4);

// Largest KKT violation of a LASSO solution: for active coordinates
// |X_j^T r - lambda*sign(w_j)|, for inactive ones max(|X_j^T r| - lambda, 0).
double kkt_violation(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& w, double lambda);

} // namespace eqdisc
