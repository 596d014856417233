#include "eqdisc/dynamics.hpp"
#include "eqdisc/stridge.hpp"

#include <doctest.h>

#include <Eigen/QR>
#include <cmath>
#include <random>

using namespace eqdisc;

namespace {

FeatureLibrary unit_library(int m) {
    FeatureLibrary lib;
    lib.n = m;
    lib.basis = Basis::monomial;
    lib.scales = Eigen::VectorXd::Ones(m);
    for (int j = 0; j < m; ++j) {
        MultiIndex mi(m, 0);
        mi[j] = 1;
        lib.descriptors.push_back(mi);
    }
    return lib;
}

Eigen::MatrixXd random_matrix(std::mt19937& rng, int rows, int cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd X(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) X(i, j) = g(rng);
    return X;
}

} // namespace

TEST_CASE("orthonormal design with a sparse target recovers exact weights") {
    std::mt19937 rng(2);
    Eigen::MatrixXd raw = random_matrix(rng, 60, 8);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    const Eigen::MatrixXd X = qr.householderQ() * Eigen::MatrixXd::Identity(60, 8);
    Eigen::VectorXd y = 3.0 * X.col(2) - 1.5 * X.col(5);
    const auto fit = stridge_fit(X, y, {}, unit_library(8));
    CHECK(fit.active == std::vector<int>{2, 5});
    CHECK(fit.weights(2) == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(fit.weights(5) == doctest::Approx(-1.5).epsilon(1e-8));
}

TEST_CASE("single relevant column among correlated noise is isolated") {
    std::mt19937 rng(8);
    const Eigen::MatrixXd X = random_matrix(rng, 100, 12);
    const Eigen::VectorXd y = 3.0 * X.col(7);
    const auto fit = stridge_fit(X, y, {}, unit_library(12));
    CHECK(fit.active == std::vector<int>{7});
    CHECK(fit.weights(7) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("zero target yields an empty active set, not an error") {
    std::mt19937 rng(4);
    const Eigen::MatrixXd X = random_matrix(rng, 30, 5);
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(30);
    const auto fit = stridge_fit(X, y, {}, unit_library(5));
    CHECK(fit.active.empty());
    CHECK(fit.weights.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("stridge recovers the third lorenz63 equation at degree 3") {
    Eigen::VectorXd x0(3);
    x0 << 1.0, 1.0, 1.0;
    const auto traj = integrate(lorenz63(), x0, 0.001, 10000);
    auto lib = enumerate_monomials(3, 3);
    lib.scales = estimate_scales(traj.states);
    const auto dm = evaluate(lib, traj.states);
    const auto fit = stridge_fit(dm.values, traj.derivatives.col(2), {}, lib);
    REQUIRE(fit.active.size() == 2);
    // graded order: index 3 is z, index 5 is x*y
    CHECK(fit.active == std::vector<int>{3, 5});
    CHECK(fit.weights(5) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(fit.weights(3) == doctest::Approx(-2.667).epsilon(0.02));
}

TEST_CASE("tighter thresholds keep subsets of looser ones") {
    std::mt19937 rng(12);
    const Eigen::MatrixXd X = random_matrix(rng, 80, 10);
    Eigen::VectorXd y = 2.0 * X.col(1) + 0.05 * X.col(6);
    StridgeConfig loose;
    loose.tau_rel = 1e-4;
    StridgeConfig tight;
    tight.tau_rel = 0.5;
    const auto fl = stridge_fit(X, y, loose, unit_library(10));
    const auto ft = stridge_fit(X, y, tight, unit_library(10));
    for (int j : ft.active)
        CHECK(std::find(fl.active.begin(), fl.active.end(), j) != fl.active.end());
    CHECK(ft.active == std::vector<int>{1});
    CHECK(fl.active == std::vector<int>{1, 6});
}

TEST_CASE("inactive weights are exactly zero and active weights solve the refit") {
    std::mt19937 rng(19);
    const Eigen::MatrixXd X = random_matrix(rng, 70, 9);
    const Eigen::VectorXd y = X.col(0) - 4.0 * X.col(4) + 0.001 * random_matrix(rng, 70, 1);
    const auto fit = stridge_fit(X, y, {}, unit_library(9));
    for (int j = 0; j < 9; ++j) {
        const bool act = std::find(fit.active.begin(), fit.active.end(), j) != fit.active.end();
        if (!act) CHECK(fit.weights(j) == 0.0);
    }
    REQUIRE(!fit.active.empty());
    Eigen::MatrixXd Xs(70, fit.active.size());
    for (size_t k = 0; k < fit.active.size(); ++k) Xs.col(k) = X.col(fit.active[k]);
    const Eigen::VectorXd oracle = (Xs.transpose() * Xs +
                                    1e-8 * Eigen::MatrixXd::Identity(Xs.cols(), Xs.cols()))
                                       .ldlt()
                                       .solve(Xs.transpose() * y);
    for (size_t k = 0; k < fit.active.size(); ++k)
        CHECK(fit.weights(fit.active[k]) == doctest::Approx(oracle(k)).epsilon(1e-8));
}

TEST_CASE("near-orthonormal designs take the analytic shortcut consistently") {
    std::mt19937 rng(23);
    Eigen::MatrixXd raw = random_matrix(rng, 50, 6);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    const Eigen::MatrixXd X = qr.householderQ() * Eigen::MatrixXd::Identity(50, 6);
    const Eigen::VectorXd y = random_matrix(rng, 50, 1);
    const auto fit = stridge_fit(X, y, {}, unit_library(6));
    // against a dense ridge solve at the final penalty
    const Eigen::VectorXd corr = X.transpose() * y;
    for (int j : fit.active)
        CHECK(fit.weights(j) == doctest::Approx(corr(j) / (1.0 + 1e-8)).epsilon(1e-10));
}

TEST_CASE("multi-target wrapper fits each derivative independently") {
    Eigen::VectorXd x0(3);
    x0 << 1.0, 1.0, 1.0;
    const auto traj = integrate(lorenz63(), x0, 0.001, 5000);
    const auto model = fit_stridge(traj, enumerate_monomials(3, 3));
    CHECK(model.active[0] == std::vector<int>{1, 8});
    CHECK(model.active[1] == std::vector<int>{1, 6});
    CHECK(model.active[2] == std::vector<int>{3, 5});
    const auto dm = evaluate(model.library, traj.states);
    const double res = (traj.derivatives - dm.values * model.weights).norm();
    CHECK(model.residual_fro == doctest::Approx(res).epsilon(1e-10));
}
