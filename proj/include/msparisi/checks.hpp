#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "msparisi/measures.hpp"
#include "msparisi/model.hpp"
#include "msparisi/optimizer.hpp"
#include "msparisi/parisi.hpp"

namespace msparisi {

using CheckRng = std::mt19937_64;

/// Valid model with r levels, zeta gaps >= 0.05 and gamma in [gamma_min, gamma_max].
ModelParams random_model(CheckRng& rng, int r, double gamma_min = 0.2, double gamma_max = 1.4, bool zero_field = true);

/// Pair with `extra` random levels besides zeta and uniformly drawn nondecreasing x.
ParisiPair random_pair(const ModelParams& params, int extra, CheckRng& rng);

/// Measure with 1..max_atoms atoms in [0, 0.95].
DiscreteMeasure random_measure(CheckRng& rng, int max_atoms);

/// Outcome of one named check. `measured` is the worst observed quantity and
/// `target` the bound it is compared with.
struct CheckResult {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Relative error used by gradient checks: |g - fd| / max(|fd|, floor).
double gradient_relative_error(double g, double fd, double floor = 1e-3);

/// All-zero x on random zero-field models reproduces the annealed value.
CheckResult check_trivial_anchor(int n_models, std::uint64_t seed, double tol = 1e-8);

/// Grid recursion versus nested quadrature with the same per-step rules (k <= k_max).
CheckResult check_oracle(int n_pairs, int k_max, std::uint64_t seed, double tol = 1e-6);

/// Analytic gradient versus central differences (step 1e-5).
CheckResult check_gradient_fd(int n_pairs, std::uint64_t seed, double tol = 1e-4);

/// Optimized value versus log 2 + gamma_r^2 / 2 and all x below x_tol.
CheckResult check_annealed_value(const OptimReport& report, const ModelParams& params, double tol = 1e-5,
                                 double x_tol = 1e-3);

/// Optimized value strictly below the annealed value by `margin`.
CheckResult check_below_annealed(const OptimReport& report, const ModelParams& params, double margin = 1e-4);

/// Finite-difference f''(0) of rs_profile (one-sided, second order, step 1e-3).
double rs_curvature_fd(const ModelParams& params);

/// FD curvature versus `formula` within tol.
CheckResult check_curvature(const ModelParams& params, double formula, double tol = 1e-3);

/// Converged report with residual below res_tol, at least `min_support` distinct support
/// points and every conditional second moment above moment_min.
CheckResult check_rsb_support(const OptimReport& report, const ModelParams& params, int min_support = 2,
                              double moment_min = 0.01, double res_tol = 1e-6);

/// Plateau inequality at level ell on an optimized report.
CheckResult check_plateau(const OptimReport& report, const ModelParams& params, int ell);

/// |P(mu1) - P(mu2)| <= 2 gamma_r^2 W1(mu1, mu2) + slack on random measure pairs.
CheckResult check_lipschitz(const ModelParams& params, int n_pairs, std::uint64_t seed, double slack = 1e-8);

/// Conditional second moments nondecreasing in ell and the synchronized coupling
/// ordered: every overlap value at level ell is <= every value at level ell + 1.
CheckResult check_ordering(const OptimReport& report, const ModelParams& params, double tol = 1e-9);

/// Duplicating a level outside zeta leaves evaluate unchanged.
CheckResult check_redundant_level(int n_pairs, std::uint64_t seed, double tol = 1e-9);

}  // namespace msparisi
