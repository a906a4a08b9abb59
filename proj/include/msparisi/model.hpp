#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace msparisi {

/// Thrown for malformed inputs: bad model parameters, out-of-range arguments.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Law of the quenched external field: finitely many (value, probability) atoms.
struct FieldLaw {
    std::vector<std::pair<double, double>> atoms{{0.0, 1.0}};

    static FieldLaw point_mass(double value) { return FieldLaw{{{value, 1.0}}}; }

    double max_abs() const;
    double second_moment() const;
    bool is_zero() const;
};

/// Physical instance of the multiscale model.
///
/// `zeta` holds zeta_0 < ... < zeta_r = 1 (r + 1 entries) and `gamma` holds
/// gamma_1 < ... < gamma_r (r entries); gamma_0 = 0 is implicit.
struct ModelParams {
    std::vector<double> zeta;
    std::vector<double> gamma;
    FieldLaw field;

    int r() const { return static_cast<int>(gamma.size()); }
    /// zeta_ell for ell in [-1, r]; zeta_{-1} = 0.
    double zeta_at(int ell) const { return ell < 0 ? 0.0 : zeta[static_cast<std::size_t>(ell)]; }
    /// gamma_ell for ell in [0, r]; gamma_0 = 0.
    double gamma_at(int ell) const { return ell <= 0 ? 0.0 : gamma[static_cast<std::size_t>(ell - 1)]; }
    double gamma_r() const { return gamma.back(); }
    /// beta_ell = sqrt(gamma_ell^2 - gamma_{ell-1}^2), ell = 1..r.
    double beta(int ell) const;
    /// log 2 + E_h log cosh h + gamma_r^2 / 2; the annealed pressure.
    double annealed_value() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_model(const ModelParams& params);

/// Throws DomainError listing every violation if the model is invalid.
void require_valid(const ModelParams& params);

/// sum_ell (zeta_ell - zeta_{ell-1}) (1 - 2 gamma_ell^2) gamma_ell^2.
/// Negative values put the model in the low-temperature (forced RSB) region.
double lowtemp_lhs(const ModelParams& params);

/// True iff gamma_r^2 <= 1/2 and the field is the point mass at zero.
bool annealed_region(const ModelParams& params);

}  // namespace msparisi
