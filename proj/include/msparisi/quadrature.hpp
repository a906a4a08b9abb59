#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace msparisi {

/// Rule for a standard normal variable: E f(eta) ~ sum_i w_i f(t_i).
/// Weights sum to 1; nodes ascending and symmetric about 0.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> log_weights;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Hermite rule of order n, computed once per order and shared.
const QuadratureRule& gauss_hermite(int n);

/// Trapezoid rule on t = i * spacing, |t| <= half_range, Gaussian weights normalized to 1.
/// Converges exponentially for integrands analytic in a strip around the real axis.
QuadratureRule gaussian_trapezoid(double spacing, double half_range);

/// log(exp(a_1) + ... + exp(a_n)), shifted by the maximum.
inline double log_sum_exp(std::span<const double> args) {
    const double mx = *std::max_element(args.begin(), args.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double a : args) s += std::exp(a - mx);
    return mx + std::log(s);
}

/// log(2 cosh z) without overflow.
inline double log2cosh(double z) {
    const double a = std::abs(z);
    return a + std::log1p(std::exp(-2.0 * a));
}

}  // namespace msparisi
