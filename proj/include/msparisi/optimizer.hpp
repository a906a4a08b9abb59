#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "msparisi/measures.hpp"
#include "msparisi/model.hpp"
#include "msparisi/parisi.hpp"

namespace msparisi {

enum class InitKind { zero, linear };

/// Starting point: a named rule or explicit x_0..x_k (x_{k+1} = 1 is implied).
using InitSpec = std::variant<InitKind, std::vector<double>>;

struct OptimizeOptions {
    double tol = 1e-8;
    double damping = 0.5;
    int max_iter = 5000;
    /// Also try the other starts (zero, linear, warm) and keep the best value.
    bool multistart = true;
    /// Consecutive iterations the value must stay within value_tol before declaring convergence.
    int stable_iters = 5;
    double value_tol = 1e-10;
};

struct OptimReport {
    ParisiPair pair;
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    /// (k, value) after each refinement step; a single entry for plain optimize_x.
    std::vector<std::pair<int, double>> refinement_history;
    /// Which start won ("zero", "linear", "warm") and whether the fallback ran.
    std::string start;
    bool used_fallback = false;
};

/// Minimizes the functional over x for a fixed xi (xi_0..xi_{k+1}, containing every zeta).
///
/// Damped fixed point x <- (1-d) x + d a(x), projected onto 0 <= x_1 <= ... <= x_k <= 1
/// with weighted pool-adjacent-violators. Switches to projected gradient with
/// backtracking when the value stops decreasing. Levels with gamma_tilde = 0 are pinned at 0.
OptimReport optimize_x(const std::vector<double>& xi, const ModelParams& params, const NumericsConfig& num = {},
                       const InitSpec& init = InitKind::linear, const OptimizeOptions& opts = {});

/// xi with `per_interval` equally spaced levels in each (zeta_{l-1}, zeta_l], l = 1..r,
/// preceded by zeta_0 and followed by the trailing 1.
std::vector<double> anchored_grid(const ModelParams& params, int per_interval);

/// Optimizes on anchored_grid for each entry of `schedule` (nondecreasing), warm-starting
/// from the quantiles of the previous optimum. Stops early once the value improves by less than 1e-7.
OptimReport refine_k(const ModelParams& params, const NumericsConfig& num, const std::vector<int>& schedule,
                     const OptimizeOptions& opts = {});

enum class PhaseKind { Annealed, RSB };

struct PhaseLabel {
    PhaseKind kind = PhaseKind::Annealed;
    /// Clusters of atoms of the optimized measure at resolution eps_support.
    int distinct_support_points = 0;
    /// Clusters whose value is at least eps_support.
    int positive_support_points = 0;
    /// (ell, Delta_ell) for ell = 0..r-1.
    std::vector<std::pair<int, double>> gaps;
    /// (ell, conditional second moment) for ell = 1..r.
    std::vector<std::pair<int, double>> conditional_moments;
};

std::string to_string(PhaseKind kind);

/// Throws DomainError on an unconverged report.
PhaseLabel classify_phase(const OptimReport& report, const ModelParams& params, double eps_support = 1e-4);

struct PlateauCheck {
    double delta = 0.0;
    double rhs = 0.0;
    bool holds = false;
    bool applicable = false;
};

/// Gap at height zeta_ell versus 2 (gamma_{ell+1}^2 - gamma_ell^2) mu^{-1}(zeta_ell) (int_{mu^{-1}(zeta_ell+)}^1 F)^2.
/// Applicable iff zeta_ell gamma_{ell+1}^2 < 1/2; holds iff delta >= rhs - 1e-9. 1 <= ell <= r-1.
PlateauCheck plateau_bound_check(const OptimReport& report, const ModelParams& params, int ell);

/// Same check on a measure directly.
PlateauCheck plateau_bound_check(const DiscreteMeasure& mu, const ModelParams& params, int ell);

/// Second derivative at 0 of rs_profile: (1 - zeta_{r-1}) gamma_r^2 (1 - 2 gamma_r^2).
double annealed_curvature(const ModelParams& params);

/// Weighted isotonic regression (nondecreasing) of y with weights w > 0.
std::vector<double> isotonic_fit(const std::vector<double>& y, const std::vector<double>& w);

}  // namespace msparisi
