#include "eqdisc/symbolic.hpp"
#include "eqdisc/dual_lasso.hpp"
#include "eqdisc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqdisc {

void MonomialPolynomial::add_term(const MultiIndex& mi, double c) {
    if (c == 0.0) return;
    auto it = terms.find(mi);
    if (it == terms.end()) {
        terms.emplace(mi, c);
    } else {
        it->second += c;
        if (it->second == 0.0) terms.erase(it);
    }
}

double MonomialPolynomial::evaluate(const Eigen::VectorXd& state) const {
    double s = 0.0;
    for (const auto& [mi, c] : terms) {
        double t = c;
        for (int i = 0; i < static_cast<int>(mi.size()); ++i)
            for (int e = 0; e < mi[i]; ++e) t *= state(i);
        s += t;
    }
    return s;
}

std::vector<double> legendre_monomial_coeffs(int degree) {
    if (degree < 0 || degree > 30)
        throw config_error("legendre_to_monomials: degree must be in [0, 30]");
    std::vector<double> prev{1.0}, cur{0.0, 1.0};
    if (degree == 0) return prev;
    for (int k = 1; k < degree; ++k) {
        // (k+1) L_{k+1}(u) = (2k+1) u L_k(u) - k L_{k-1}(u)
        std::vector<double> next(k + 2, 0.0);
        for (int i = 0; i <= k; ++i) next[i + 1] += (2 * k + 1) * cur[i];
        for (int i = 0; i < k; ++i) next[i] -= k * prev[i];
        for (double& c : next) c /= (k + 1);
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

std::vector<double> legendre_to_monomials(int degree) { return legendre_monomial_coeffs(degree); }

MonomialPolynomial expand_feature(const FeatureDescriptor& desc, double weight) {
    const int n = static_cast<int>(desc.index.size());
    MonomialPolynomial poly;
    poly.n = n;
    if (weight == 0.0) return poly;
    if (desc.basis == Basis::monomial) {
        poly.add_term(desc.index, weight);
        return poly;
    }
    // tensor product of univariate Legendre expansions
    std::vector<std::vector<double>> coeffs(n);
    for (int i = 0; i < n; ++i) coeffs[i] = legendre_monomial_coeffs(desc.index[i]);
    MultiIndex mono(n, 0);
    auto rec = [&](auto&& self, int i, double c) -> void {
        if (i == n) {
            poly.add_term(mono, c);
            return;
        }
        for (int e = 0; e < static_cast<int>(coeffs[i].size()); ++e) {
            if (coeffs[i][e] == 0.0) continue;
            mono[i] = e;
            self(self, i + 1, c * coeffs[i][e]);
        }
        mono[i] = 0;
    };
    rec(rec, 0, weight);
    return poly;
}

DiscoveredModel expand_model(const SparseLinearModel& model) {
    const int n = static_cast<int>(model.weights.cols());
    DiscoveredModel out;
    out.n = model.library.n;
    out.equations.assign(n, MonomialPolynomial{});
    for (int t = 0; t < n; ++t) {
        out.equations[t].n = model.library.n;
        for (int j = 0; j < model.library.size(); ++j) {
            double w = model.weights(j, t);
            if (w == 0.0) continue;
            for (const auto& [mi, c] : expand_feature(model.library.descriptor(j), w).terms)
                out.equations[t].add_term(mi, c);
        }
    }
    return out;
}

namespace {

double monomial_scale_mag(const MultiIndex& mi, double c, const Eigen::VectorXd& scales) {
    double m = std::abs(c);
    for (int i = 0; i < static_cast<int>(mi.size()); ++i) m *= std::pow(scales(i), mi[i]);
    return m;
}

} // namespace

DiscoveredModel threshold_model(const DiscoveredModel& model, const Eigen::VectorXd& scales,
                                double tau_final) {
    if (!(tau_final > 0.0 && tau_final < 1.0))
        throw config_error("threshold_model: tau_final must be in (0,1)");
    DiscoveredModel out;
    out.n = model.n;
    out.equations.reserve(model.equations.size());
    for (const auto& eq : model.equations) {
        double max_mag = 0.0;
        for (const auto& [mi, c] : eq.terms)
            max_mag = std::max(max_mag, monomial_scale_mag(mi, c, scales));
        MonomialPolynomial kept;
        kept.n = eq.n;
        for (const auto& [mi, c] : eq.terms)
            if (monomial_scale_mag(mi, c, scales) >= tau_final * max_mag) kept.add_term(mi, c);
        out.equations.push_back(std::move(kept));
    }
    return out;
}

namespace {

std::string format_coeff(double c) {
    std::ostringstream os;
    os.precision(4);
    os << c;
    return os.str();
}

std::string format_monomial(const MultiIndex& mi) {
    std::string s;
    for (int i = 0; i < static_cast<int>(mi.size()); ++i) {
        if (mi[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += "x" + std::to_string(i + 1);
        if (mi[i] > 1) s += "^" + std::to_string(mi[i]);
    }
    return s;
}

} // namespace

std::string render_equation(const MonomialPolynomial& poly, const Eigen::VectorXd& scales,
                            int target) {
    std::vector<std::pair<MultiIndex, double>> terms(poly.terms.begin(), poly.terms.end());
    std::sort(terms.begin(), terms.end(), [&](const auto& a, const auto& b) {
        return monomial_scale_mag(a.first, a.second, scales) >
               monomial_scale_mag(b.first, b.second, scales);
    });
    std::string s = "dx" + std::to_string(target + 1) + "/dt =";
    if (terms.empty()) return s + " 0";
    bool first = true;
    for (const auto& [mi, c] : terms) {
        const std::string mono = format_monomial(mi);
        double a = std::abs(c);
        s += first ? (c < 0 ? " -" : " ") : (c < 0 ? " - " : " + ");
        s += format_coeff(a);
        if (!mono.empty()) s += "*" + mono;
        first = false;
    }
    return s;
}

std::string render_model(const DiscoveredModel& model, const Eigen::VectorXd& scales) {
    std::string s;
    for (int t = 0; t < static_cast<int>(model.equations.size()); ++t) {
        s += render_equation(model.equations[t], scales, t);
        s += "\n";
    }
    return s;
}

ModelScore score_against_truth(const DiscoveredModel& model, const DiscoveredModel& truth,
                               const Eigen::VectorXd& scales, double tau) {
    if (model.n != truth.n) throw config_error("score_against_truth: dimension mismatch");
    const DiscoveredModel a = threshold_model(model, scales, tau);
    const DiscoveredModel b = threshold_model(truth, scales, tau);
    int tp = 0, model_terms = 0, truth_terms = 0;
    double max_err = 0.0;
    for (size_t i = 0; i < a.equations.size(); ++i) {
        model_terms += static_cast<int>(a.equations[i].terms.size());
        truth_terms += static_cast<int>(b.equations[i].terms.size());
        for (const auto& [mi, c_true] : b.equations[i].terms) {
            auto it = a.equations[i].terms.find(mi);
            if (it == a.equations[i].terms.end()) continue;
            ++tp;
            max_err = std::max(max_err, std::abs(it->second - c_true) / std::abs(c_true));
        }
    }
    ModelScore score;
    score.precision = model_terms > 0 ? static_cast<double>(tp) / model_terms : 1.0;
    score.recall = truth_terms > 0 ? static_cast<double>(tp) / truth_terms : 1.0;
    score.max_coefficient_error = max_err;
    return score;
}

} // namespace eqdisc
