#include "msparisi/model.hpp"

#include <cmath>
#include <sstream>

namespace msparisi {

double FieldLaw::max_abs() const {
    double m = 0.0;
    for (const auto& [h, p] : atoms) m = std::max(m, std::abs(h));
    return m;
}

double FieldLaw::second_moment() const {
    double s = 0.0;
    for (const auto& [h, p] : atoms) s += p * h * h;
    return s;
}

bool FieldLaw::is_zero() const {
    for (const auto& [h, p] : atoms)
        if (p > 0.0 && h != 0.0) return false;
    return true;
}

double ModelParams::beta(int ell) const {
    const double g1 = gamma_at(ell), g0 = gamma_at(ell - 1);
    return std::sqrt(g1 * g1 - g0 * g0);
}

double ModelParams::annealed_value() const {
    double e = 0.0;
    for (const auto& [h, p] : field.atoms) {
        const double a = std::abs(h);
        e += p * (a + std::log1p(std::exp(-2.0 * a)));
    }
    return e + 0.5 * gamma_r() * gamma_r();
}

ValidationReport validate_model(const ModelParams& params) {
    ValidationReport rep;
    auto& v = rep.violations;
    const auto r = params.gamma.size();
    if (r < 1) v.emplace_back("r must be at least 1");
    if (params.zeta.size() != r + 1) {
        std::ostringstream os;
        os << "zeta must have r+1 = " << r + 1 << " entries, got " << params.zeta.size();
        v.push_back(os.str());
    }
    if (!params.zeta.empty()) {
        if (!(params.zeta.front() > 0.0)) v.emplace_back("zeta_0 must be positive");
        if (params.zeta.back() != 1.0) v.emplace_back("zeta_r must equal 1");
        for (std::size_t i = 1; i < params.zeta.size(); ++i) {
            if (!(params.zeta[i] > params.zeta[i - 1])) {
                v.emplace_back("zeta not strictly increasing");
                break;
            }
        }
    }
    if (!params.gamma.empty()) {
        if (!(params.gamma.front() > 0.0)) v.emplace_back("gamma_1 must be positive");
        for (std::size_t i = 1; i < params.gamma.size(); ++i) {
            if (!(params.gamma[i] > params.gamma[i - 1])) {
                v.emplace_back("gamma not strictly increasing");
                break;
            }
        }
        for (double g : params.gamma)
            if (!std::isfinite(g)) {
                v.emplace_back("gamma must be finite");
                break;
            }
    }
    const auto& atoms = params.field.atoms;
    if (atoms.empty()) {
        v.emplace_back("field law has no atoms");
    } else {
        double total = 0.0;
        bool bad = false;
        for (const auto& [h, p] : atoms) {
            if (!std::isfinite(h) || !std::isfinite(p) || p < 0.0) bad = true;
            total += p;
        }
        if (bad) v.emplace_back("field atoms must be finite with nonnegative probability");
        if (std::abs(total - 1.0) > 1e-12) v.emplace_back("field probabilities must sum to 1");
    }
    return rep;
}

void require_valid(const ModelParams& params) {
    const auto rep = validate_model(params);
    if (rep.ok()) return;
    std::string msg = "invalid model:";
    for (const auto& s : rep.violations) msg += " " + s + ";";
    throw DomainError(msg);
}

double lowtemp_lhs(const ModelParams& params) {
    double s = 0.0;
    for (int ell = 1; ell <= params.r(); ++ell) {
        const double g2 = params.gamma_at(ell) * params.gamma_at(ell);
        s += (params.zeta_at(ell) - params.zeta_at(ell - 1)) * (1.0 - 2.0 * g2) * g2;
    }
    return s;
}

bool annealed_region(const ModelParams& params) {
    return params.gamma_r() * params.gamma_r() <= 0.5 && params.field.is_zero();
}

}  // namespace msparisi
