#include "eqdisc/dynamics.hpp"
#include "eqdisc/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace eqdisc {

namespace {

DiscoveredModel lorenz63_truth() {
    DiscoveredModel m;
    m.n = 3;
    m.equations.assign(3, MonomialPolynomial{});
    for (auto& eq : m.equations) eq.n = 3;
    m.equations[0].add_term({1, 0, 0}, -10.0);
    m.equations[0].add_term({0, 1, 1}, 10.0);
    m.equations[1].add_term({1, 0, 0}, 28.0);
    m.equations[1].add_term({1, 0, 1}, -1.0);
    m.equations[2].add_term({1, 1, 0}, 1.0);
    m.equations[2].add_term({0, 0, 1}, -2.667);
    return m;
}

DiscoveredModel lorenz_quadratic_truth() {
    DiscoveredModel m = lorenz63_truth();
    m.equations[2] = MonomialPolynomial{};
    m.equations[2].n = 3;
    m.equations[2].add_term({2, 2, 0}, 1.0);
    m.equations[2].add_term({0, 0, 1}, -2.667);
    return m;
}

} // namespace

OdeSystem lorenz63() {
    OdeSystem sys;
    sys.name = "lorenz63";
    sys.n = 3;
    sys.rhs = [](const Eigen::VectorXd& s) {
        Eigen::VectorXd d(3);
        d(0) = 10.0 * (s(1) * s(2) - s(0));
        d(1) = s(0) * (28.0 - s(2));
        d(2) = s(0) * s(1) - 2.667 * s(2);
        return d;
    };
    sys.true_model = lorenz63_truth();
    return sys;
}

OdeSystem lorenz_quadratic() {
    OdeSystem sys;
    sys.name = "lorenz_quadratic";
    sys.n = 3;
    sys.rhs = [](const Eigen::VectorXd& s) {
        Eigen::VectorXd d(3);
        d(0) = 10.0 * (s(1) * s(2) - s(0));
        d(1) = s(0) * (28.0 - s(2));
        double xy = s(0) * s(1);
        d(2) = xy * xy - 2.667 * s(2);
        return d;
    };
    sys.true_model = lorenz_quadratic_truth();
    return sys;
}

StateTrajectory integrate(const OdeSystem& system, const Eigen::VectorXd& x0, double dt,
                          int steps) {
    if (dt <= 0.0) throw config_error("integrate: dt must be positive");
    if (steps < 2) throw config_error("integrate: need at least 2 steps");
    if (x0.size() != system.n) throw config_error("integrate: x0 dimension mismatch");

    const int T = steps + 1;
    StateTrajectory traj;
    traj.times.resize(T);
    traj.states.resize(T, system.n);
    traj.derivatives.resize(T, system.n);
    traj.derivative_source = DerivativeSource::exact_rhs;

    Eigen::VectorXd x = x0;
    for (int k = 0; k < T; ++k) {
        if (!x.allFinite())
            throw pipeline_error("integrate: state blew up at step " + std::to_string(k));
        traj.times(k) = k * dt;
        traj.states.row(k) = x;
        traj.derivatives.row(k) = system.rhs(x);
        if (k == steps) break;
        const Eigen::VectorXd k1 = system.rhs(x);
        const Eigen::VectorXd k2 = system.rhs(x + 0.5 * dt * k1);
        const Eigen::VectorXd k3 = system.rhs(x + 0.5 * dt * k2);
        const Eigen::VectorXd k4 = system.rhs(x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return traj;
}

Eigen::MatrixXd finite_difference_derivatives(const Eigen::VectorXd& times,
                                              const Eigen::MatrixXd& states) {
    const auto T = states.rows();
    if (T < 3) throw config_error("finite differences need at least 3 samples");
    const double dt = times(1) - times(0);
    for (Eigen::Index k = 1; k + 1 < T; ++k)
        if (std::abs((times(k + 1) - times(k)) - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw config_error("finite differences require a uniform time grid");

    Eigen::MatrixXd D(T, states.cols());
    D.middleRows(1, T - 2) = (states.bottomRows(T - 2) - states.topRows(T - 2)) / (2.0 * dt);
    // second-order one-sided stencils at the endpoints
    D.row(0) = (-3.0 * states.row(0) + 4.0 * states.row(1) - states.row(2)) / (2.0 * dt);
    D.row(T - 1) = (3.0 * states.row(T - 1) - 4.0 * states.row(T - 2) + states.row(T - 3)) / (2.0 * dt);
    return D;
}

StateTrajectory with_fd_derivatives(const StateTrajectory& traj) {
    StateTrajectory out = traj;
    out.derivatives = finite_difference_derivatives(traj.times, traj.states);
    out.derivative_source = DerivativeSource::finite_difference;
    return out;
}

namespace {

std::string shortest_repr(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

} // namespace

void write_trajectory_csv(const StateTrajectory& traj, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw config_error("cannot open for writing: " + path);
    const int n = traj.dimension();
    f << "t";
    for (int i = 1; i <= n; ++i) f << ",x" << i;
    for (int i = 1; i <= n; ++i) f << ",dx" << i;
    f << "\n";
    for (int k = 0; k < traj.samples(); ++k) {
        f << shortest_repr(traj.times(k));
        for (int i = 0; i < n; ++i) f << "," << shortest_repr(traj.states(k, i));
        for (int i = 0; i < n; ++i) f << "," << shortest_repr(traj.derivatives(k, i));
        f << "\n";
    }
}

StateTrajectory read_trajectory_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("cannot open trajectory CSV: " + path);
    std::string header;
    if (!std::getline(f, header)) throw config_error("empty trajectory CSV: " + path);
    int cols = 1;
    for (char c : header) cols += (c == ',');
    if (cols < 3 || cols % 2 == 0)
        throw config_error("trajectory CSV header must be t,x1..xn,dx1..dxn");
    const int n = (cols - 1) / 2;

    std::vector<double> values;
    std::string line;
    int rows = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        int got = 0;
        while (std::getline(ls, cell, ',')) {
            values.push_back(std::stod(cell));
            ++got;
        }
        if (got != cols) throw config_error("trajectory CSV: ragged row " + std::to_string(rows));
        ++rows;
    }
    if (rows < 3) throw config_error("trajectory CSV needs at least 3 samples");

    StateTrajectory traj;
    traj.times.resize(rows);
    traj.states.resize(rows, n);
    traj.derivatives.resize(rows, n);
    for (int k = 0; k < rows; ++k) {
        const double* row = values.data() + static_cast<size_t>(k) * cols;
        traj.times(k) = row[0];
        for (int i = 0; i < n; ++i) traj.states(k, i) = row[1 + i];
        for (int i = 0; i < n; ++i) traj.derivatives(k, i) = row[1 + n + i];
    }
    return traj;
}

} // namespace eqdisc
