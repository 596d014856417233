#include "eqdisc/dynamics.hpp"
#include "eqdisc/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace eqdisc;

namespace {

OdeSystem exponential_decay() {
    OdeSystem sys;
    sys.name = "decay";
    sys.n = 1;
    sys.rhs = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd d(1);
        d(0) = -x(0);
        return d;
    };
    return sys;
}

} // namespace

TEST_CASE("rk4 integrates exponential decay to 1e-8 over unit time") {
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    const auto traj = integrate(exponential_decay(), x0, 0.01, 100);
    CHECK(traj.samples() == 101);
    CHECK(traj.times(100) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(traj.states(100, 0) - std::exp(-1.0)) < 1e-8);
    // exact derivatives recorded from the vector field
    CHECK(traj.states(50, 0) == doctest::Approx(-traj.derivatives(50, 0)).epsilon(1e-12));
    CHECK(traj.derivative_source == DerivativeSource::exact_rhs);
}

TEST_CASE("rk4 shows fourth-order step-size convergence") {
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    auto err_at = [&](double dt, int steps) {
        const auto t = integrate(exponential_decay(), x0, dt, steps);
        return std::abs(t.states(steps, 0) - std::exp(-1.0));
    };
    const double e1 = err_at(0.1, 10);
    const double e2 = err_at(0.05, 20);
    const double ratio = e1 / e2;
    // halving dt should cut the error by about 2^4 = 16
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("rk4 matches a dt/10 reference on lorenz63") {
    Eigen::VectorXd x0(3);
    x0 << 1.0, 1.0, 1.0;
    const auto coarse = integrate(lorenz63(), x0, 0.001, 100);
    const auto fine = integrate(lorenz63(), x0, 0.0001, 1000);
    CHECK((coarse.states.row(100) - fine.states.row(1000)).norm() < 1e-8);
}

TEST_CASE("rk4 reports blow-up with the failing step") {
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    OdeSystem sys;
    sys.name = "explode";
    sys.n = 1;
    sys.rhs = [](const Eigen::VectorXd& x) {
        Eigen::VectorXd d(1);
        d(0) = x(0) * x(0);
        return d;
    };
    CHECK_THROWS_AS((void)integrate(sys, x0, 0.5, 100), pipeline_error);
}

TEST_CASE("benchmark vector fields agree with their stated models") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (const auto& sys : {lorenz63(), lorenz_quadratic()}) {
        REQUIRE(sys.true_model.has_value());
        for (int it = 0; it < 100; ++it) {
            Eigen::VectorXd x(3);
            x << u(rng), u(rng), u(rng);
            const Eigen::VectorXd d = sys.rhs(x);
            for (int t = 0; t < 3; ++t)
                CHECK(std::abs(d(t) - sys.true_model->equations[t].evaluate(x)) < 1e-12);
        }
    }
}

TEST_CASE("lorenz63 right-hand side at a fixed point of reference") {
    Eigen::VectorXd x(3);
    x << 2.0, -1.0, 3.0;
    const Eigen::VectorXd d = lorenz63().rhs(x);
    CHECK(d(0) == doctest::Approx(10.0 * (-1.0 * 3.0 - 2.0)).epsilon(1e-15)); // -50
    CHECK(d(1) == doctest::Approx(2.0 * (28.0 - 3.0)).epsilon(1e-15));        // 50
    CHECK(d(2) == doctest::Approx(2.0 * -1.0 - 2.667 * 3.0).epsilon(1e-15));  // -10.001
}

TEST_CASE("quadratic variant differs from lorenz63 only in the third equation") {
    Eigen::VectorXd x(3);
    x << 2.0, -1.0, 3.0;
    const Eigen::VectorXd a = lorenz63().rhs(x);
    const Eigen::VectorXd b = lorenz_quadratic().rhs(x);
    CHECK(a(0) == b(0));
    CHECK(a(1) == b(1));
    CHECK(b(2) == doctest::Approx(std::pow(2.0 * -1.0, 2) - 2.667 * 3.0).epsilon(1e-15)); // -4.001
}

TEST_CASE("finite differences are exact on linear and quadratic signals") {
    const int T = 50;
    const double dt = 0.02;
    Eigen::VectorXd times(T);
    Eigen::MatrixXd states(T, 2);
    for (int i = 0; i < T; ++i) {
        const double t = dt * i;
        times(i) = t;
        states(i, 0) = 3.0 * t - 1.0;           // derivative 3
        states(i, 1) = t * t + 0.5 * t;         // derivative 2t + 0.5
    }
    const Eigen::MatrixXd d = finite_difference_derivatives(times, states);
    for (int i = 0; i < T; ++i) {
        CHECK(d(i, 0) == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(d(i, 1) == doctest::Approx(2.0 * times(i) + 0.5).epsilon(1e-10));
    }
}

TEST_CASE("finite differences converge at second order") {
    auto max_err = [](double dt, int T) {
        Eigen::VectorXd times(T);
        Eigen::MatrixXd states(T, 1);
        for (int i = 0; i < T; ++i) {
            times(i) = dt * i;
            states(i, 0) = std::sin(times(i));
        }
        const Eigen::MatrixXd d = finite_difference_derivatives(times, states);
        double e = 0.0;
        for (int i = 0; i < T; ++i) e = std::max(e, std::abs(d(i, 0) - std::cos(times(i))));
        return e;
    };
    const double ratio = max_err(0.02, 101) / max_err(0.01, 201);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("finite differences require a uniform grid and enough samples") {
    Eigen::VectorXd times(3);
    times << 0.0, 0.1, 0.3;
    Eigen::MatrixXd states = Eigen::MatrixXd::Zero(3, 1);
    CHECK_THROWS_AS((void)finite_difference_derivatives(times, states), config_error);
    Eigen::VectorXd two(2);
    two << 0.0, 0.1;
    CHECK_THROWS_AS((void)finite_difference_derivatives(two, states.topRows(2)), config_error);
}

TEST_CASE("trajectory csv round-trips bit-exactly") {
    Eigen::VectorXd x0(3);
    x0 << 1.0, 1.0, 1.0;
    const auto traj = integrate(lorenz63(), x0, 0.001, 200);
    const auto path = std::filesystem::temp_directory_path() / "eqdisc_roundtrip.csv";
    write_trajectory_csv(traj, path.string());
    const auto back = read_trajectory_csv(path.string());
    REQUIRE(back.samples() == traj.samples());
    REQUIRE(back.dimension() == traj.dimension());
    CHECK((back.times - traj.times).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.states - traj.states).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.derivatives - traj.derivatives).lpNorm<Eigen::Infinity>() == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("fd replacement keeps states and marks the source") {
    Eigen::VectorXd x0(3);
    x0 << 1.0, 1.0, 1.0;
    const auto traj = integrate(lorenz63(), x0, 0.001, 500);
    const auto fd = with_fd_derivatives(traj);
    CHECK(fd.derivative_source == DerivativeSource::finite_difference);
    CHECK((fd.states - traj.states).norm() == 0.0);
    // interior fd derivative close to the exact one in relative terms
    const double rel = (fd.derivatives.row(250) - traj.derivatives.row(250)).norm() /
                       traj.derivatives.row(250).norm();
    CHECK(rel < 0.01);
}
