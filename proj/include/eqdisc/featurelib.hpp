#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace eqdisc {

// Per-variable exponents (monomial basis) or per-variable Legendre degrees
// (tensor-product Legendre basis).
using MultiIndex = std::vector<int>;

inline int total_degree(const MultiIndex& mi) {
    int d = 0;
    for (int e : mi) d += e;
    return d;
}

enum class Basis { monomial, legendre };

struct FeatureDescriptor {
    Basis basis;
    MultiIndex index;
};

// Ordered feature basis over n state variables plus the typical scale L_i of
// each variable (used by scale-based thresholding).
struct FeatureLibrary {
    int n = 0;
    Basis basis = Basis::monomial;
    std::vector<MultiIndex> descriptors;
    Eigen::VectorXd scales; // length n, all positive

    int size() const { return static_cast<int>(descriptors.size()); }
    FeatureDescriptor descriptor(int j) const { return {basis, descriptors[j]}; }
};

struct DesignMatrix {
    Eigen::MatrixXd values;       // T x m
    Eigen::VectorXd column_norms; // length m
    FeatureLibrary library;
};

// All multi-indices with total degree <= p, graded order: degree ascending,
// then lexicographic with the first variable's exponent most significant and
// descending, so for n=3 degree one reads x, y, z. Scales default to 1.
FeatureLibrary enumerate_monomials(int n, int p);

// Same enumeration but tagged as tensor-product Legendre features.
FeatureLibrary enumerate_legendre(int n, int p);

// C(n+p, n); throws config_error on overflow.
long long library_size(int n, int p);

// Degree-d Legendre polynomial at raw (unscaled) u via the Bonnet recurrence.
// Requires 0 <= degree <= 30.
double legendre_eval(int degree, double u);

// Sum_k |c_k| L^k where c are the monomial coefficients of Legendre_d:
// an upper bound for |Legendre_d| on [-L, L] that cannot vanish at roots.
double legendre_abs_majorant(int degree, double L);

DesignMatrix evaluate(const FeatureLibrary& library, const Eigen::MatrixXd& states);

// Evaluate a single descriptor on every row of `states` (used by the growth
// loop to append one candidate column without rebuilding the design).
Eigen::VectorXd evaluate_column(const FeatureDescriptor& desc, const Eigen::MatrixXd& states);

// |w| * prod_i L_i^{p_i} (monomial) or |w| * prod_i majorant(a_i, L_i) (Legendre).
double scale_magnitude(const FeatureLibrary& library, int j, double w);

// Data-driven scales: max_t |states[t][i]|, floored at 1e-8.
Eigen::VectorXd estimate_scales(const Eigen::MatrixXd& states);

// Manifest JSON: {"n":..,"basis":..,"descriptors":[[..],..],"scales":[..]}.
std::string library_to_json(const FeatureLibrary& library);
FeatureLibrary library_from_json(const std::string& json_text);

} // namespace eqdisc
