#pragma once

#include "eqdisc/symbolic.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

namespace eqdisc {

enum class DerivativeSource { exact_rhs, finite_difference };

struct OdeSystem {
    std::string name;
    int n = 0;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rhs;
    std::optional<DiscoveredModel> true_model; // ground truth for scoring, if known
};

struct StateTrajectory {
    Eigen::VectorXd times;       // strictly increasing, length T >= 3
    Eigen::MatrixXd states;      // T x n
    Eigen::MatrixXd derivatives; // T x n
    DerivativeSource derivative_source = DerivativeSource::exact_rhs;

    int samples() const { return static_cast<int>(states.rows()); }
    int dimension() const { return static_cast<int>(states.cols()); }
};

// Lorenz 63 exactly as used by the benchmarks here:
//   dx/dt = 10(yz - x),  dy/dt = x(28 - z),  dz/dt = xy - 2.667 z
OdeSystem lorenz63();

// Quadratic variant: dz/dt = (xy)^2 - 2.667 z, first two equations as above.
OdeSystem lorenz_quadratic();

// Classical fixed-step RK4; derivatives filled from the rhs at each sample.
// Throws pipeline_error naming the step if the state leaves the finite range.
StateTrajectory integrate(const OdeSystem& system, const Eigen::VectorXd& x0, double dt,
                          int steps);

// Second-order central differences inside, second-order one-sided stencils at
// both ends. Requires a uniform grid (throws config_error otherwise).
Eigen::MatrixXd finite_difference_derivatives(const Eigen::VectorXd& times,
                                              const Eigen::MatrixXd& states);

// Replace the derivatives with finite-difference estimates.
StateTrajectory with_fd_derivatives(const StateTrajectory& traj);

// CSV: header t,x1,...,xn,dx1,...,dxn; shortest round-trip decimal formatting.
void write_trajectory_csv(const StateTrajectory& traj, const std::string& path);
StateTrajectory read_trajectory_csv(const std::string& path);

} // namespace eqdisc
