#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "msparisi/measures.hpp"
#include "msparisi/model.hpp"
#include "msparisi/quadrature.hpp"

namespace msparisi {

/// Pair violates an invariant needed by the recursion (e.g. a negative variance increment).
class InvariantError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Numerical accuracy check failed (grid too narrow, mass drift).
class AccuracyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Formula only valid at stationary pairs was called elsewhere.
class NotStationaryError : public std::domain_error {
public:
    NotStationaryError(const std::string& what, double residual) : std::domain_error(what), residual(residual) {}
    double residual;
};

enum class QuadKind {
    /// Trapezoid in eta with spacing 0.35 / max(c, 1), chosen per step.
    trapezoid,
    /// Fixed Gauss-Hermite rule of order quad_nodes.
    gauss_hermite,
};

struct NumericsConfig {
    QuadKind quad_rule = QuadKind::trapezoid;
    /// Gauss-Hermite order when quad_rule == gauss_hermite.
    int quad_nodes = 40;
    int grid_points = 2049;
    /// Unset means the automatic rule, see resolved_half_width().
    std::optional<double> grid_half_width;
};

/// Grid half-width used for a model: the configured value, or
/// max|h| + 6 sqrt(2) gamma_r plus a fixed tail margin.
double resolved_half_width(const NumericsConfig& num, const ModelParams& params);

/// Throws DomainError if the configuration violates its invariants for this model.
void validate_numerics(const NumericsConfig& num, const ModelParams& params);

/// One-dimensional Gaussian rule used for a step of spread c and exponent xi.
QuadratureRule step_rule(const NumericsConfig& num, double c, double xi);

/// Phi(z) on a uniform grid, stored as residuals against log 2cosh z so that
/// the tails extrapolate by a constant.
///
/// value residual  psi = Phi - log 2cosh z      (Hermite cubic, slope = mag residual)
/// mag residual    rho = dPhi/dz - tanh z       (4-point Lagrange cubic)
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(double half_width, int points);

    /// Phi_{k+1}(z) = log 2cosh z, i.e. both residuals zero.
    static GridFunction log2cosh_terminal(double half_width, int points);

    double value(double z) const;
    /// m(z) = dPhi/dz, the local magnetization.
    double magnetization(double z) const;
    /// Both at once, sharing the interval lookup and the exponential.
    void evaluate(double z, double& phi, double& mag) const;

    int size() const { return static_cast<int>(psi_.size()); }
    double node(int i) const { return z0_ + dz_ * i; }
    double spacing() const { return dz_; }
    double half_width() const { return -z0_; }
    double value_at_node(int i) const;
    double magnetization_at_node(int i) const;
    void set_node(int i, double phi, double mag);

    /// max(|rho|) at the two edge nodes; large values mean the tails are not flat yet.
    double edge_residual() const;
    /// |m| <= 1 and m nondecreasing (convexity of Phi), both within tol.
    bool magnetization_bounded_and_monotone(double tol) const;

private:
    double z0_ = 0.0;
    double dz_ = 1.0;
    std::vector<double> psi_;
    std::vector<double> rho_;
};

/// gamma_tilde_j = gamma_ell for the unique ell with zeta_{ell-1} < xi_j <= zeta_ell
/// (gamma_0 = 0 below zeta_0). Throws DomainError for xi outside (0,1].
std::vector<double> effective_gammas(const std::vector<double>& xi, const ModelParams& params);

/// Output of the backwards recursion for one pair.
struct Recursion {
    ParisiPair pair;
    /// c[j] = sqrt(2 (gt_j^2 x_j - gt_{j-1}^2 x_{j-1})), j = 1..k+1; c[0] = 0.
    std::vector<double> c;
    /// rules[j] is the Gaussian rule of step j (empty when c[j] = 0).
    std::vector<QuadratureRule> rules;
    /// phi[j] represents Phi_j, j = 0..k+1.
    std::vector<GridFunction> phi;
    /// Phi_0 evaluated directly at each field atom.
    std::vector<double> phi0_at_field;
    double correction = 0.0;
    double value = 0.0;
};

Recursion solve_recursion(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num);

/// E_h Phi_0(h) - 1/2 sum_{j=0}^{k} xi_j [(gt_{j+1} x_{j+1})^2 - (gt_j x_j)^2].
double evaluate(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num = {});

/// Same functional by literal nested Gauss-Hermite quadrature over (eta_1..eta_{k+1}),
/// no grid involved. Refuses k > 4.
double evaluate_oracle(const ParisiPair& pair, const ModelParams& params, int quad_nodes = 40);

/// Nested quadrature using the same per-step rules as evaluate(pair, params, num).
double evaluate_oracle(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num);

/// One-level profile f(x_r) for h = 0: xi = (zeta_0..zeta_{r-1}, 1, 1), x = (0..0, x_r, 1).
/// For r = 1 the exponent is zeta_0.
double rs_profile(double x_r, const ModelParams& params);

/// One level of a tilted flow: either the initial field atoms or weights on the grid nodes.
struct DensityLevel {
    bool on_grid = false;
    std::vector<double> points;
    std::vector<double> weights;

    double mass() const;
    /// Density values weights / dz (only meaningful on the grid).
    std::vector<double> density(double dz) const;
};

/// Tilted laws p_j of the accumulated field, j = 0..k+1.
struct DensityFlow {
    std::vector<DensityLevel> levels;
    double dz = 0.0;
};

DensityFlow forward_densities(const Recursion& rec, const ModelParams& params);

/// a_j = E prod_{p<=j} f_p (<sigma>^{(j)})^2 = integral of p_j m_j^2, j = 1..k (index 0 unused).
std::vector<double> overlap_targets(const Recursion& rec, const DensityFlow& flow);

/// Value, consistency targets and gradient in one pass.
struct ParisiEvaluation {
    double value = 0.0;
    std::vector<double> targets;   // a_j, j = 0..k (a_0 = 0)
    std::vector<double> gradient;  // d P / d x_j, j = 0..k (entry 0 = 0)
    double residual = 0.0;
};

ParisiEvaluation evaluate_full(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num = {});

/// dP/dx_j = gt_j^2 (xi_j - xi_{j-1}) (x_j - a_j), returned for j = 1..k.
std::vector<double> grad_x(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num = {});

/// max |x_j - a_j| over components that carry weight gt_j^2 (xi_j - xi_{j-1}) > 0.
double stationarity_residual(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num = {});

/// dP/dgamma_ell, ell = 1..r, valid at stationary pairs only.
/// Throws NotStationaryError when the residual exceeds `tol`.
std::vector<double> grad_gamma(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num = {},
                               double tol = 1e-6);

}  // namespace msparisi
