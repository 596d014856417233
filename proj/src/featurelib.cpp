#include "eqdisc/featurelib.hpp"
#include "eqdisc/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

namespace eqdisc {

namespace {

void enumerate_degree(int n, int deg, MultiIndex& prefix, std::vector<MultiIndex>& out) {
    int pos = static_cast<int>(prefix.size());
    if (pos == n - 1) {
        prefix.push_back(deg);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    // first variable takes the largest exponent first: x before y before z
    for (int e = deg; e >= 0; --e) {
        prefix.push_back(e);
        enumerate_degree(n, deg - e, prefix, out);
        prefix.pop_back();
    }
}

FeatureLibrary enumerate_basis(int n, int p, Basis basis) {
    if (n < 1 || p < 0) throw config_error("enumerate: need n >= 1 and p >= 0");
    library_size(n, p); // overflow check
    FeatureLibrary lib;
    lib.n = n;
    lib.basis = basis;
    lib.scales = Eigen::VectorXd::Ones(n);
    MultiIndex prefix;
    for (int deg = 0; deg <= p; ++deg) enumerate_degree(n, deg, prefix, lib.descriptors);
    return lib;
}

} // namespace

long long library_size(int n, int p) {
    // C(n+p, n) with overflow detection
    long long c = 1;
    for (int i = 1; i <= n; ++i) {
        long long num = p + i;
        if (c > std::numeric_limits<long long>::max() / num)
            throw config_error("library size C(n+p,n) overflows");
        c = c * num / i;
    }
    return c;
}

FeatureLibrary enumerate_monomials(int n, int p) { return enumerate_basis(n, p, Basis::monomial); }
FeatureLibrary enumerate_legendre(int n, int p) { return enumerate_basis(n, p, Basis::legendre); }

double legendre_eval(int degree, double u) {
    if (degree < 0 || degree > 30) throw config_error("legendre_eval: degree must be in [0, 30]");
    if (degree == 0) return 1.0;
    double prev = 1.0, cur = u;
    for (int k = 1; k < degree; ++k) {
        double next = ((2 * k + 1) * u * cur - k * prev) / (k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> legendre_monomial_coeffs(int degree); // defined in symbolic.cpp

double legendre_abs_majorant(int degree, double L) {
    const auto coeffs = legendre_monomial_coeffs(degree);
    double s = 0.0, Lk = 1.0;
    for (double c : coeffs) {
        s += std::abs(c) * Lk;
        Lk *= L;
    }
    return s;
}

Eigen::VectorXd evaluate_column(const FeatureDescriptor& desc, const Eigen::MatrixXd& states) {
    const auto T = states.rows();
    Eigen::VectorXd col = Eigen::VectorXd::Ones(T);
    for (int i = 0; i < static_cast<int>(desc.index.size()); ++i) {
        int d = desc.index[i];
        if (d == 0) continue;
        if (desc.basis == Basis::monomial) {
            for (int e = 0; e < d; ++e) col.array() *= states.col(i).array();
        } else {
            for (Eigen::Index t = 0; t < T; ++t) col(t) *= legendre_eval(d, states(t, i));
        }
    }
    return col;
}

DesignMatrix evaluate(const FeatureLibrary& library, const Eigen::MatrixXd& states) {
    if (states.cols() != library.n) throw config_error("evaluate: state dimension mismatch");
    if (!states.allFinite()) throw config_error("evaluate: non-finite state input");
    DesignMatrix dm;
    dm.library = library;
    dm.values.resize(states.rows(), library.size());
    for (int j = 0; j < library.size(); ++j)
        dm.values.col(j) = evaluate_column(library.descriptor(j), states);
    dm.column_norms = dm.values.colwise().norm();
    return dm;
}

double scale_magnitude(const FeatureLibrary& library, int j, double w) {
    double mag = std::abs(w);
    const MultiIndex& mi = library.descriptors[j];
    for (int i = 0; i < library.n; ++i) {
        if (library.basis == Basis::monomial)
            mag *= std::pow(library.scales(i), mi[i]);
        else
            mag *= legendre_abs_majorant(mi[i], library.scales(i));
    }
    return mag;
}

Eigen::VectorXd estimate_scales(const Eigen::MatrixXd& states) {
    Eigen::VectorXd s = states.cwiseAbs().colwise().maxCoeff();
    return s.cwiseMax(1e-8);
}

std::string library_to_json(const FeatureLibrary& library) {
    nlohmann::json j;
    j["n"] = library.n;
    j["basis"] = library.basis == Basis::monomial ? "monomial" : "legendre";
    j["descriptors"] = library.descriptors;
    j["scales"] = std::vector<double>(library.scales.data(), library.scales.data() + library.n);
    return j.dump(2);
}

FeatureLibrary library_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("library manifest: ") + e.what());
    }
    FeatureLibrary lib;
    lib.n = j.at("n").get<int>();
    const auto basis = j.at("basis").get<std::string>();
    if (basis == "monomial")
        lib.basis = Basis::monomial;
    else if (basis == "legendre")
        lib.basis = Basis::legendre;
    else
        throw config_error("library manifest: unknown basis '" + basis + "'");
    lib.descriptors = j.at("descriptors").get<std::vector<MultiIndex>>();
    const auto scales = j.at("scales").get<std::vector<double>>();
    lib.scales = Eigen::Map<const Eigen::VectorXd>(scales.data(), scales.size());
    return lib;
}

} // namespace eqdisc
