#include "msparisi/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace msparisi {

namespace {

// Newton iteration on orthonormal Hermite polynomials (physicists' convention),
// then rescaled to the standard normal weight.
QuadratureRule build_gauss_hermite(int n) {
    if (n < 1) throw std::invalid_argument("Gauss-Hermite order must be positive");
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> x(un), w(un);
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    const int m = (n + 1) / 2;
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        const auto a = static_cast<std::size_t>(i), b = un - 1 - a;
        x[a] = z;
        x[b] = -z;
        w[a] = 2.0 / (pp * pp);
        w[b] = w[a];
    }
    QuadratureRule rule;
    auto& nodes = rule.nodes;
    auto& weights = rule.weights;
    auto& log_weights = rule.log_weights;
    nodes.resize(un);
    weights.resize(un);
    log_weights.resize(un);
    double total = 0.0;
    for (std::size_t i = 0; i < un; ++i) total += w[i];
    // Ascending node order.
    for (std::size_t i = 0; i < un; ++i) {
        nodes[i] = std::numbers::sqrt2 * x[un - 1 - i];
        weights[i] = w[un - 1 - i] / total;
        log_weights[i] = std::log(weights[i]);
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_hermite(int n) {
    static std::mutex mtx;
    static std::map<int, QuadratureRule> cache;
    std::lock_guard lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_hermite(n)).first;
    return it->second;
}

QuadratureRule gaussian_trapezoid(double spacing, double half_range) {
    if (!(spacing > 0.0) || !(half_range > 0.0)) throw std::invalid_argument("trapezoid rule needs positive spacing and range");
    const int m = static_cast<int>(std::floor(half_range / spacing));
    QuadratureRule rule;
    double total = 0.0;
    for (int i = -m; i <= m; ++i) {
        const double t = i * spacing;
        rule.nodes.push_back(t);
        rule.log_weights.push_back(-0.5 * t * t);
        total += std::exp(-0.5 * t * t);
    }
    const double log_total = std::log(total);
    for (double& lw : rule.log_weights) {
        lw -= log_total;
        rule.weights.push_back(std::exp(lw));
    }
    return rule;
}

}  // namespace msparisi
