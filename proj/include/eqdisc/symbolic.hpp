#pragma once

#include "eqdisc/featurelib.hpp"

#include <map>
#include <string>
#include <vector>

namespace eqdisc {

struct SparseLinearModel; // defined in dual_lasso.hpp

// Sparse multivariate polynomial in collected monomial form. The map gives a
// canonical term order independent of summation order.
struct MonomialPolynomial {
    int n = 0;
    std::map<MultiIndex, double> terms; // no zero coefficients stored

    void add_term(const MultiIndex& mi, double c);
    double evaluate(const Eigen::VectorXd& state) const;
};

// One polynomial per state equation: equations[i] is d(x_i)/dt.
struct DiscoveredModel {
    int n = 0;
    std::vector<MonomialPolynomial> equations;
};

// Exact monomial coefficients of the univariate Legendre polynomial of the
// given degree (ascending powers), via the Bonnet recurrence on coefficient
// vectors. Requires degree <= 30.
std::vector<double> legendre_to_monomials(int degree);

// Expand one weighted library feature into collected monomial terms.
MonomialPolynomial expand_feature(const FeatureDescriptor& desc, double weight);

// Expand a fitted model (monomial or Legendre library) into exact collected
// monomial form, one polynomial per target.
DiscoveredModel expand_model(const SparseLinearModel& model);

// Drop, per equation, every monomial whose scale magnitude |c|*prod L_i^{p_i}
// is below tau_final times the equation's largest scale magnitude.
DiscoveredModel threshold_model(const DiscoveredModel& model, const Eigen::VectorXd& scales,
                                double tau_final);

// Human-readable rendering, terms sorted by descending scale magnitude,
// coefficients at 4 significant digits: "dx3/dt = 0.9675*x1^2*x2^2 - 2.62*x3".
std::string render_equation(const MonomialPolynomial& poly, const Eigen::VectorXd& scales,
                            int target);
std::string render_model(const DiscoveredModel& model, const Eigen::VectorXd& scales);

struct ModelScore {
    double precision = 0.0;
    double recall = 0.0;
    double max_coefficient_error = 0.0; // max relative error over support intersection
};

// Compare supports (as multi-index sets, after thresholding both models at
// tau with the given scales) and coefficients.
ModelScore score_against_truth(const DiscoveredModel& model, const DiscoveredModel& truth,
                               const Eigen::VectorXd& scales, double tau);

} // namespace eqdisc
