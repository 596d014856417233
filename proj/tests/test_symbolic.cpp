#include "eqdisc/dual_lasso.hpp"
#include "eqdisc/symbolic.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace eqdisc;

TEST_CASE("legendre monomial coefficients match closed forms") {
    CHECK(legendre_to_monomials(0) == std::vector<double>{1.0});
    CHECK(legendre_to_monomials(1) == std::vector<double>{0.0, 1.0});
    const auto p2 = legendre_to_monomials(2);
    CHECK(p2[0] == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(p2[1] == 0.0);
    CHECK(p2[2] == doctest::Approx(1.5).epsilon(1e-15));
    const auto p4 = legendre_to_monomials(4);
    CHECK(p4[0] == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
    CHECK(p4[2] == doctest::Approx(-30.0 / 8.0).epsilon(1e-15));
    CHECK(p4[4] == doctest::Approx(35.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("expanded features evaluate identically to the originals") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> deg(0, 4);
    std::uniform_int_distribution<int> nvars(1, 3);
    std::uniform_real_distribution<double> wdist(-5.0, 5.0);
    for (int it = 0; it < 200; ++it) {
        const int n = nvars(rng);
        MultiIndex mi(n);
        for (int i = 0; i < n; ++i) mi[i] = deg(rng);
        const double w = wdist(rng);
        for (Basis basis : {Basis::monomial, Basis::legendre}) {
            const FeatureDescriptor desc{basis, mi};
            const auto poly = expand_feature(desc, w);
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x(i) = u(rng);
            double direct = w;
            for (int i = 0; i < n; ++i)
                direct *= basis == Basis::monomial ? std::pow(x(i), mi[i])
                                                   : legendre_eval(mi[i], x(i));
            CHECK(std::abs(poly.evaluate(x) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("expansion is linear in the weights") {
    const FeatureDescriptor d{Basis::legendre, {2, 1}};
    const auto a = expand_feature(d, 1.0);
    const auto b = expand_feature(d, -3.0);
    for (const auto& [mi, c] : a.terms)
        CHECK(b.terms.at(mi) == doctest::Approx(-3.0 * c).epsilon(1e-14));
}

TEST_CASE("polynomial arithmetic collects and cancels terms") {
    MonomialPolynomial p;
    p.n = 2;
    p.add_term({1, 0}, 2.0);
    p.add_term({1, 0}, -2.0);
    p.add_term({0, 1}, 1.5);
    CHECK(p.terms.size() == 1);
    Eigen::VectorXd x(2);
    x << 7.0, 2.0;
    CHECK(p.evaluate(x) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("thresholding drops small terms and is idempotent") {
    DiscoveredModel m;
    m.n = 3;
    m.equations.resize(3);
    auto& eq = m.equations[2];
    eq.n = 3;
    eq.add_term({2, 2, 0}, 0.97);   // (xy)^2
    eq.add_term({2, 0, 0}, 0.007);  // x^2
    eq.add_term({0, 2, 0}, -0.007); // y^2
    eq.add_term({0, 0, 1}, -2.62);  // z
    eq.add_term({0, 0, 0}, 0.027);  // constant
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(3);
    const auto cut = threshold_model(m, unit, 0.05);
    const auto& kept = cut.equations[2].terms;
    CHECK(kept.size() == 2);
    CHECK(kept.count({2, 2, 0}) == 1);
    CHECK(kept.count({0, 0, 1}) == 1);
    CHECK(kept.count({2, 0, 0}) == 0);
    CHECK(kept.count({0, 2, 0}) == 0);
    CHECK(kept.count({0, 0, 0}) == 0);
    const auto again = threshold_model(cut, unit, 0.05);
    CHECK(again.equations[2].terms.size() == 2);
}

TEST_CASE("rendering sorts by scale magnitude at four significant digits") {
    DiscoveredModel m;
    m.n = 3;
    m.equations.resize(3);
    auto& eq = m.equations[2];
    eq.n = 3;
    eq.add_term({2, 2, 0}, 0.96753);
    eq.add_term({0, 0, 1}, -2.62);
    // with large x1/x2 scales the quartic dominates and renders first
    Eigen::VectorXd s(3);
    s << 10.0, 10.0, 1.0;
    CHECK(render_equation(eq, s, 2) == "dx3/dt = 0.9675*x1^2*x2^2 - 2.62*x3");
    // with unit scales the linear term outranks the quartic
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(3);
    CHECK(render_equation(eq, unit, 2) == "dx3/dt = -2.62*x3 + 0.9675*x1^2*x2^2");
}

TEST_CASE("scores compare supports and coefficients after thresholding") {
    DiscoveredModel truth;
    truth.n = 1;
    truth.equations.resize(1);
    truth.equations[0].n = 1;
    truth.equations[0].add_term({1}, 2.0);
    truth.equations[0].add_term({2}, -1.0);

    DiscoveredModel got = truth;
    got.equations[0].terms[{1}] = 2.2;        // 10% off
    got.equations[0].add_term({3}, 0.5);      // spurious
    got.equations[0].terms.erase({2});        // missed
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(1);
    const auto sc = score_against_truth(got, truth, unit, 1e-6);
    CHECK(sc.precision == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sc.recall == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sc.max_coefficient_error == doctest::Approx(0.1).epsilon(1e-12));

    const auto perfect = score_against_truth(truth, truth, unit, 1e-6);
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);
    CHECK(perfect.max_coefficient_error == 0.0);
}

TEST_CASE("expanding a fitted legendre model matches column evaluation") {
    FeatureLibrary lib = enumerate_legendre(2, 3);
    lib.scales = Eigen::Vector2d(1.0, 1.0);
    SparseLinearModel model;
    model.library = lib;
    model.weights = Eigen::MatrixXd::Zero(lib.size(), 2);
    model.active.resize(2);
    model.weights(4, 0) = 1.7; // some degree-2 feature
    model.active[0] = {4};
    model.weights(2, 1) = -0.3;
    model.active[1] = {2};
    const auto expanded = expand_model(model);
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    Eigen::MatrixXd pts(20, 2);
    for (int i = 0; i < 20; ++i) {
        pts(i, 0) = u(rng);
        pts(i, 1) = u(rng);
    }
    const auto dm = evaluate(lib, pts);
    const Eigen::MatrixXd direct = dm.values * model.weights;
    for (int i = 0; i < 20; ++i)
        for (int t = 0; t < 2; ++t)
            CHECK(std::abs(expanded.equations[t].evaluate(pts.row(i).transpose()) -
                           direct(i, t)) < 1e-10);
}
