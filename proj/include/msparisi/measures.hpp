#pragma once

#include <string>
#include <utility>
#include <vector>

#include "msparisi/model.hpp"

namespace msparisi {

/// Atomic probability measure on [0,1).
///
/// Stored as strictly increasing atoms `y` and the matching cumulative
/// masses `m` (m_i = mu([0, y_i]), m.back() == 1).
class DiscreteMeasure {
public:
    DiscreteMeasure() : y_{0.0}, m_{1.0} {}

    /// Builds from (value, weight) pairs in any order. Equal values are
    /// merged, zero weights dropped, weights renormalized if they sum to
    /// 1 within 1e-12. Throws DomainError otherwise.
    static DiscreteMeasure from_atoms(std::vector<std::pair<double, double>> atoms);
    static DiscreteMeasure point_mass(double value) { return from_atoms({{value, 1.0}}); }

    const std::vector<double>& atoms() const { return y_; }
    const std::vector<double>& cdf() const { return m_; }
    std::size_t size() const { return y_.size(); }
    double weight(std::size_t i) const { return m_[i] - (i == 0 ? 0.0 : m_[i - 1]); }
    std::vector<std::pair<double, double>> weighted_atoms() const;

    /// mu([0, s]).
    double cdf_at(double s) const;

private:
    std::vector<double> y_;
    std::vector<double> m_;
};

/// Replica-symmetry-breaking candidate (x, xi) with derived effective couplings.
///
/// Index range j = 0..k+1; xi[k] = xi[k+1] = 1 and x[k+1] = 1.
struct ParisiPair {
    std::vector<double> xi;
    std::vector<double> x;
    std::vector<double> gamma_tilde;

    int k() const { return static_cast<int>(xi.size()) - 2; }
};

/// Builds a pair from xi and x (both including the trailing k+1 entry) and
/// fills gamma_tilde from the model.
ParisiPair make_pair(std::vector<double> xi, std::vector<double> x, const ModelParams& params);

/// Lists violated pair invariants; empty means valid.
std::vector<std::string> validate_pair(const ParisiPair& pair, const ModelParams& params);

struct CouplingAtom {
    double x;
    double gamma;
    double prob;
};

/// Law of (mu^{-1}(U), mu_Gamma^{-1}(U)) for a common uniform U.
struct SyncCoupling {
    std::vector<CouplingAtom> pairs;
};

/// inf{s : mu([0,s]) >= p}. Throws DomainError for p outside [0,1].
double quantile(const DiscreteMeasure& mu, double p);

/// Right limit of the quantile at p, i.e. lim_{q -> p+} mu^{-1}(q); p in [0,1).
double quantile_right(const DiscreteMeasure& mu, double p);

/// Integral over [0,1] of |mu1^{-1}(p) - mu2^{-1}(p)| dp, exact on the merged CDF grid.
double wasserstein1(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2);

/// xi = sorted(m u zeta) with a trailing 1 appended, x_j = mu^{-1}(xi_j).
ParisiPair measure_to_pair(const DiscreteMeasure& mu, const ModelParams& params);

/// Law of Y with P(Y = x_j) = xi_j - xi_{j-1}, j = 0..k; equal x values merge.
DiscreteMeasure pair_to_measure(const ParisiPair& pair);

/// Integral of x^power against the overlap law conditional on Gamma = gamma_ell, 1 <= ell <= r.
double conditional_moment(const DiscreteMeasure& mu, const ModelParams& params, int ell, int power);

/// Quantile jump mu^{-1}(zeta_ell+) - mu^{-1}(zeta_ell), 0 <= ell <= r-1.
double gap_delta(const DiscreteMeasure& mu, const ModelParams& params, int ell);

/// Comonotone coupling of mu with mu_Gamma, where mu_Gamma(gamma_ell) = zeta_ell - zeta_{ell-1}.
SyncCoupling sync_coupling(const DiscreteMeasure& mu, const ModelParams& params);

}  // namespace msparisi
