#include "msparisi/parisi.hpp"

#include <array>
#include <cstddef>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace msparisi {

namespace {

// Extra half-width beyond max|h| + 6 sqrt(2) gamma_r: the tilts shift the accumulated field
// by up to 2 gamma_r^2, plus a fixed margin so the residuals are flat at the edges.
constexpr double kTailMargin = 8.0;
constexpr double kEdgeTol = 1e-7;
// Trapezoid spacing is kTrapSpacing / max(c, 1): log 2cosh has poles at distance pi / (2c)
// from the real eta axis, so the discretization error stays near exp(-pi^2 / kTrapSpacing).
constexpr double kTrapSpacing = 0.35;
constexpr double kTrapRange = 10.0;
constexpr double kMassTol = 1e-6;
constexpr double kEscapeTol = 1e-10;

// Cubic Lagrange weights on the four consecutive nodes s..s+3 at offset t from node s.
std::array<double, 4> lagrange4(double t) {
    return {-(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0, t * (t - 2.0) * (t - 3.0) / 2.0,
            -t * (t - 1.0) * (t - 3.0) / 2.0, t * (t - 1.0) * (t - 2.0) / 6.0};
}

// Phi_{j-1}(z) and m_{j-1}(z) from Phi_j by one Gaussian step of spread c and exponent xi.
void tilted_step(const GridFunction& next, double z, double c, double xi, const QuadratureRule& rule, double& phi,
                 double& mag) {
    const std::size_t nq = rule.size();
    thread_local std::vector<double> a, m;
    a.resize(nq);
    m.resize(nq);
    if (xi > 0.0) {
        for (std::size_t q = 0; q < nq; ++q) {
            double v;
            next.evaluate(z + c * rule.nodes[q], v, m[q]);
            a[q] = rule.log_weights[q] + xi * v;
        }
        const double lse = log_sum_exp(std::span<const double>(a.data(), nq));
        double mm = 0.0;
        for (std::size_t q = 0; q < nq; ++q) mm += std::exp(a[q] - lse) * m[q];
        phi = lse / xi;
        mag = mm;
    } else {
        // xi -> 0 limit: plain Gaussian average.
        double p = 0.0, mm = 0.0;
        for (std::size_t q = 0; q < nq; ++q) {
            double v, mq;
            next.evaluate(z + c * rule.nodes[q], v, mq);
            p += rule.weights[q] * v;
            mm += rule.weights[q] * mq;
        }
        phi = p;
        mag = mm;
    }
}

std::vector<double> increments(const ParisiPair& pair) {
    const int k = pair.k();
    std::vector<double> c(static_cast<std::size_t>(k + 2), 0.0);
    for (int j = 1; j <= k + 1; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double v = pair.gamma_tilde[uj] * pair.gamma_tilde[uj] * pair.x[uj] -
                         pair.gamma_tilde[uj - 1] * pair.gamma_tilde[uj - 1] * pair.x[uj - 1];
        if (v < -1e-13) {
            std::ostringstream os;
            os << "negative variance increment at level " << j << ": " << v;
            throw InvariantError(os.str());
        }
        c[uj] = std::sqrt(2.0 * std::max(0.0, v));
    }
    return c;
}

void check_pair(const ParisiPair& pair, const ModelParams& params) {
    const auto v = validate_pair(pair, params);
    if (v.empty()) return;
    std::string msg = "invalid pair:";
    for (const auto& s : v) msg += " " + s + ";";
    throw InvariantError(msg);
}

double correction_term(const ParisiPair& pair) {
    double s = 0.0;
    for (int j = 0; j <= pair.k(); ++j) {
        const auto a = static_cast<std::size_t>(j), b = a + 1;
        const double hi = pair.gamma_tilde[b] * pair.x[b];
        const double lo = pair.gamma_tilde[a] * pair.x[a];
        s += pair.xi[a] * (hi * hi - lo * lo);
    }
    return 0.5 * s;
}

}  // namespace

double resolved_half_width(const NumericsConfig& num, const ModelParams& params) {
    if (num.grid_half_width) return *num.grid_half_width;
    const double g = params.gamma_r();
    return params.field.max_abs() + 6.0 * std::numbers::sqrt2 * g + 2.0 * g * g + kTailMargin;
}

QuadratureRule step_rule(const NumericsConfig& num, double c, double xi) {
    if (num.quad_rule == QuadKind::gauss_hermite) return gauss_hermite(num.quad_nodes);
    // The tilt exp(xi Phi) grows like exp(xi c |t|), which shifts the effective support.
    return gaussian_trapezoid(kTrapSpacing / std::max(c, 1.0), kTrapRange + xi * c);
}

void validate_numerics(const NumericsConfig& num, const ModelParams& params) {
    if (num.quad_nodes < 8 || num.quad_nodes > 256) throw DomainError("quad_nodes must lie in [8, 256]");
    if (num.grid_points < 257) throw DomainError("grid_points must be at least 257");
    if (num.grid_half_width) {
        const double need = params.field.max_abs() + 6.0 * std::numbers::sqrt2 * params.gamma_r();
        if (*num.grid_half_width < need) {
            std::ostringstream os;
            os << "grid_half_width " << *num.grid_half_width << " below required " << need;
            throw DomainError(os.str());
        }
    }
}

// ---------------------------------------------------------------------------
// GridFunction

GridFunction::GridFunction(double half_width, int points)
    : z0_(-half_width), dz_(2.0 * half_width / (points - 1)), psi_(static_cast<std::size_t>(points), 0.0),
      rho_(static_cast<std::size_t>(points), 0.0) {}

GridFunction GridFunction::log2cosh_terminal(double half_width, int points) { return GridFunction(half_width, points); }

double GridFunction::value(double z) const {
    const double u = (z - z0_) / dz_;
    const int n = size();
    double psi;
    if (u <= 0.0) {
        psi = psi_.front();
    } else if (u >= n - 1) {
        psi = psi_.back();
    } else {
        const int i = static_cast<int>(u);
        const double t = u - i, t2 = t * t, t3 = t2 * t;
        const auto a = static_cast<std::size_t>(i);
        psi = (2 * t3 - 3 * t2 + 1) * psi_[a] + (t3 - 2 * t2 + t) * dz_ * rho_[a] + (-2 * t3 + 3 * t2) * psi_[a + 1] +
              (t3 - t2) * dz_ * rho_[a + 1];
    }
    return log2cosh(z) + psi;
}

double GridFunction::magnetization(double z) const {
    const double u = (z - z0_) / dz_;
    const int n = size();
    double rho;
    if (u <= 0.0) {
        rho = rho_.front();
    } else if (u >= n - 1) {
        rho = rho_.back();
    } else {
        const int s = std::clamp(static_cast<int>(u) - 1, 0, n - 4);
        const auto w = lagrange4(u - s);
        const auto a = static_cast<std::size_t>(s);
        rho = w[0] * rho_[a] + w[1] * rho_[a + 1] + w[2] * rho_[a + 2] + w[3] * rho_[a + 3];
    }
    return std::tanh(z) + rho;
}

void GridFunction::evaluate(double z, double& phi, double& mag) const {
    const double u = (z - z0_) / dz_;
    const int n = size();
    double psi, rho;
    if (u <= 0.0) {
        psi = psi_.front();
        rho = rho_.front();
    } else if (u >= n - 1) {
        psi = psi_.back();
        rho = rho_.back();
    } else {
        const int i = static_cast<int>(u);
        const double t = u - i, t2 = t * t, t3 = t2 * t;
        const auto a = static_cast<std::size_t>(i);
        psi = (2 * t3 - 3 * t2 + 1) * psi_[a] + (t3 - 2 * t2 + t) * dz_ * rho_[a] + (-2 * t3 + 3 * t2) * psi_[a + 1] +
              (t3 - t2) * dz_ * rho_[a + 1];
        const int s = std::clamp(i - 1, 0, n - 4);
        const auto w = lagrange4(u - s);
        const auto b = static_cast<std::size_t>(s);
        rho = w[0] * rho_[b] + w[1] * rho_[b + 1] + w[2] * rho_[b + 2] + w[3] * rho_[b + 3];
    }
    const double az = std::abs(z);
    const double e = std::exp(-2.0 * az);
    phi = az + std::log1p(e) + psi;
    mag = std::copysign((1.0 - e) / (1.0 + e), z) + rho;
}

double GridFunction::value_at_node(int i) const {
    return log2cosh(node(i)) + psi_[static_cast<std::size_t>(i)];
}

double GridFunction::magnetization_at_node(int i) const {
    return std::tanh(node(i)) + rho_[static_cast<std::size_t>(i)];
}

void GridFunction::set_node(int i, double phi, double mag) {
    const double z = node(i);
    psi_[static_cast<std::size_t>(i)] = phi - log2cosh(z);
    rho_[static_cast<std::size_t>(i)] = mag - std::tanh(z);
}

double GridFunction::edge_residual() const { return std::max(std::abs(rho_.front()), std::abs(rho_.back())); }

bool GridFunction::magnetization_bounded_and_monotone(double tol) const {
    double prev = -2.0;
    for (int i = 0; i < size(); ++i) {
        const double m = magnetization_at_node(i);
        if (std::abs(m) > 1.0 + tol) return false;
        if (m < prev - tol) return false;
        prev = m;
    }
    return true;
}

// ---------------------------------------------------------------------------

std::vector<double> effective_gammas(const std::vector<double>& xi, const ModelParams& params) {
    std::vector<double> out;
    out.reserve(xi.size());
    for (double s : xi) {
        if (!(s > 0.0 && s <= 1.0)) {
            std::ostringstream os;
            os << "xi value " << s << " outside (0,1]";
            throw DomainError(os.str());
        }
        int ell = 0;
        while (ell < params.r() && params.zeta_at(ell) < s - 1e-14) ++ell;
        out.push_back(params.gamma_at(ell));
    }
    return out;
}

Recursion solve_recursion(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num) {
    validate_numerics(num, params);
    check_pair(pair, params);
    Recursion rec;
    rec.pair = pair;
    rec.c = increments(pair);
    const int k = pair.k();
    const double half = resolved_half_width(num, params);
    rec.rules.resize(rec.c.size());
    for (std::size_t j = 1; j < rec.c.size(); ++j)
        if (rec.c[j] > 0.0) rec.rules[j] = step_rule(num, rec.c[j], pair.xi[j - 1]);

    rec.phi.resize(static_cast<std::size_t>(k + 2));
    rec.phi[static_cast<std::size_t>(k + 1)] = GridFunction::log2cosh_terminal(half, num.grid_points);
    for (int j = k + 1; j >= 1; --j) {
        const auto uj = static_cast<std::size_t>(j);
        const GridFunction& next = rec.phi[uj];
        if (rec.c[uj] == 0.0) {
            rec.phi[uj - 1] = next;
            continue;
        }
        GridFunction cur(half, num.grid_points);
        const double xi = pair.xi[uj - 1];
        for (int i = 0; i < cur.size(); ++i) {
            double phi, mag;
            tilted_step(next, cur.node(i), rec.c[uj], xi, rec.rules[uj], phi, mag);
            cur.set_node(i, phi, mag);
        }
        if (cur.edge_residual() > kEdgeTol) {
            std::ostringstream os;
            os << "grid half-width " << half << " too small at level " << j - 1 << " (edge residual "
               << cur.edge_residual() << ")";
            throw AccuracyError(os.str());
        }
        rec.phi[uj - 1] = std::move(cur);
    }

    // Phi_0 at the field atoms straight from the first non-trivial level.
    int first = 1;
    while (first <= k + 1 && rec.c[static_cast<std::size_t>(first)] == 0.0) ++first;
    double e_phi0 = 0.0;
    for (const auto& [h, p] : params.field.atoms) {
        double phi, mag;
        if (first > k + 1) {
            phi = log2cosh(h);
        } else {
            const auto uf = static_cast<std::size_t>(first);
            tilted_step(rec.phi[uf], h, rec.c[uf], pair.xi[uf - 1], rec.rules[uf], phi, mag);
        }
        rec.phi0_at_field.push_back(phi);
        e_phi0 += p * phi;
    }
    rec.correction = correction_term(pair);
    rec.value = e_phi0 - rec.correction;
    return rec;
}

double evaluate(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num) {
    return solve_recursion(pair, params, num).value;
}

namespace {

double nested_quadrature(const ParisiPair& pair, const ModelParams& params,
                         const std::function<QuadratureRule(double, double)>& rule_for) {
    check_pair(pair, params);
    const int k = pair.k();
    if (k > 4) throw DomainError("evaluate_oracle refuses k > 4 (cost grows as nodes^(k+1))");
    const auto& gt = pair.gamma_tilde;
    const auto& x = pair.x;
    const auto& xi = pair.xi;

    std::vector<double> c(static_cast<std::size_t>(k + 2), 0.0);
    std::vector<QuadratureRule> rules(c.size());
    for (std::size_t j = 1; j <= static_cast<std::size_t>(k + 1); ++j) {
        const double v = gt[j] * gt[j] * x[j] - gt[j - 1] * gt[j - 1] * x[j - 1];
        if (v < -1e-13) throw InvariantError("negative variance increment");
        c[j] = std::sqrt(2.0 * std::max(0.0, v));
        if (c[j] > 0.0) rules[j] = rule_for(c[j], xi[j - 1]);
    }

    // log Z_j as a function of the field accumulated through eta_1..eta_j.
    std::function<double(int, double)> log_z = [&](int j, double z) -> double {
        if (j == k + 1) return log2cosh(z);
        const auto nj = static_cast<std::size_t>(j + 1);
        if (c[nj] == 0.0) return log_z(j + 1, z);
        const double e = xi[static_cast<std::size_t>(j)];
        const auto& rule = rules[nj];
        std::vector<double> terms(rule.size());
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double inner = log_z(j + 1, z + c[nj] * rule.nodes[q]);
            terms[q] = e > 0.0 ? rule.log_weights[q] + e * inner : inner;
        }
        if (e > 0.0) return log_sum_exp(terms) / e;
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * terms[q];
        return s;
    };

    double value = 0.0;
    for (const auto& [h, p] : params.field.atoms) value += p * log_z(0, h);
    double corr = 0.0;
    for (std::size_t j = 0; j <= static_cast<std::size_t>(k); ++j) {
        corr += xi[j] * (std::pow(gt[j + 1] * x[j + 1], 2) - std::pow(gt[j] * x[j], 2));
    }
    return value - 0.5 * corr;
}

}  // namespace

double evaluate_oracle(const ParisiPair& pair, const ModelParams& params, int quad_nodes) {
    const auto& rule = gauss_hermite(quad_nodes);
    return nested_quadrature(pair, params, [&](double, double) { return rule; });
}

double evaluate_oracle(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num) {
    return nested_quadrature(pair, params, [&](double c, double xi) { return step_rule(num, c, xi); });
}

double rs_profile(double x_r, const ModelParams& params) {
    if (!(x_r >= 0.0 && x_r <= 1.0)) throw DomainError("rs_profile argument outside [0,1]");
    const double zeta = params.zeta_at(params.r() - 1);
    const double g = params.gamma_r();
    const double scale = g * std::sqrt(2.0 * x_r);
    const auto rule = step_rule(NumericsConfig{}, scale, zeta);
    std::vector<double> terms(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
        terms[q] = rule.log_weights[q] + zeta * (log2cosh(scale * rule.nodes[q]) - std::numbers::ln2);
    return std::numbers::ln2 + log_sum_exp(terms) / zeta +
           0.5 * g * g * (1.0 - 2.0 * x_r + (1.0 - zeta) * x_r * x_r);
}

// ---------------------------------------------------------------------------
// Forward tilted densities

double DensityLevel::mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

std::vector<double> DensityLevel::density(double dz) const {
    std::vector<double> d(weights);
    for (double& v : d) v /= dz;
    return d;
}

DensityFlow forward_densities(const Recursion& rec, const ModelParams& params) {
    const int k = rec.pair.k();
    const GridFunction& grid = rec.phi.front();
    const int n = grid.size();
    DensityFlow flow;
    flow.dz = grid.spacing();
    DensityLevel p0;
    for (const auto& [h, p] : params.field.atoms) {
        p0.points.push_back(h);
        p0.weights.push_back(p);
    }
    flow.levels.push_back(std::move(p0));

    for (int j = 1; j <= k + 1; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const DensityLevel& prev = flow.levels.back();
        if (rec.c[uj] == 0.0) {
            flow.levels.push_back(prev);
            continue;
        }
        const double c = rec.c[uj];
        const double xi = rec.pair.xi[uj - 1];
        const auto& rule = rec.rules[uj];
        const GridFunction& before = rec.phi[uj - 1];
        const GridFunction& after = rec.phi[uj];
        DensityLevel next;
        next.on_grid = true;
        next.weights.assign(static_cast<std::size_t>(n), 0.0);
        next.points.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) next.points[static_cast<std::size_t>(i)] = grid.node(i);
        double escaped = 0.0;
        for (std::size_t b = 0; b < prev.weights.size(); ++b) {
            const double wb = prev.weights[b];
            if (wb == 0.0) continue;
            const double zb = prev.points[b];
            const double norm = prev.on_grid ? before.value_at_node(static_cast<int>(b)) : before.value(zb);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double zz = zb + c * rule.nodes[q];
                const double tilt = xi > 0.0 ? std::exp(xi * (after.value(zz) - norm)) : 1.0;
                const double wt = wb * rule.weights[q] * tilt;
                // Deposit with the adjoint of cubic Lagrange interpolation.
                const double u = (zz - grid.node(0)) / flow.dz;
                if (u <= 0.0 || u >= n - 1) {
                    escaped += std::abs(wt);
                    next.weights[u <= 0.0 ? 0 : static_cast<std::size_t>(n - 1)] += wt;
                    continue;
                }
                const int s = std::clamp(static_cast<int>(u) - 1, 0, n - 4);
                const auto lw = lagrange4(u - s);
                for (int t = 0; t < 4; ++t) next.weights[static_cast<std::size_t>(s + t)] += wt * lw[static_cast<std::size_t>(t)];
            }
        }
        if (escaped > kEscapeTol) {
            std::ostringstream os;
            os << "tilted mass " << escaped << " left the grid at level " << j;
            throw AccuracyError(os.str());
        }
        const double mass = next.mass();
        if (std::abs(mass - 1.0) > kMassTol) {
            std::ostringstream os;
            os << "tilted density at level " << j << " has mass " << mass;
            throw AccuracyError(os.str());
        }
        flow.levels.push_back(std::move(next));
    }
    return flow;
}

std::vector<double> overlap_targets(const Recursion& rec, const DensityFlow& flow) {
    const int k = rec.pair.k();
    std::vector<double> a(static_cast<std::size_t>(k + 1), 0.0);
    for (int j = 1; j <= k; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const auto& lev = flow.levels[uj];
        const auto& phi = rec.phi[uj];
        double s = 0.0;
        for (std::size_t b = 0; b < lev.weights.size(); ++b) {
            if (lev.weights[b] == 0.0) continue;
            const double m = lev.on_grid ? phi.magnetization_at_node(static_cast<int>(b)) : phi.magnetization(lev.points[b]);
            s += lev.weights[b] * m * m;
        }
        a[uj] = s;
    }
    return a;
}

ParisiEvaluation evaluate_full(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num) {
    const auto rec = solve_recursion(pair, params, num);
    const auto flow = forward_densities(rec, params);
    ParisiEvaluation ev;
    ev.value = rec.value;
    ev.targets = overlap_targets(rec, flow);
    const int k = pair.k();
    ev.gradient.assign(static_cast<std::size_t>(k + 1), 0.0);
    for (int j = 1; j <= k; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double weight = pair.gamma_tilde[uj] * pair.gamma_tilde[uj] * (pair.xi[uj] - pair.xi[uj - 1]);
        const double diff = pair.x[uj] - ev.targets[uj];
        ev.gradient[uj] = weight * diff;
        if (weight > 0.0) ev.residual = std::max(ev.residual, std::abs(diff));
    }
    return ev;
}

std::vector<double> grad_x(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num) {
    auto g = evaluate_full(pair, params, num).gradient;
    g.erase(g.begin());
    return g;
}

double stationarity_residual(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num) {
    return evaluate_full(pair, params, num).residual;
}

std::vector<double> grad_gamma(const ParisiPair& pair, const ModelParams& params, const NumericsConfig& num,
                               double tol) {
    const double res = stationarity_residual(pair, params, num);
    if (res > tol) {
        std::ostringstream os;
        os << "grad_gamma needs a stationary pair; residual " << res << " exceeds " << tol;
        throw NotStationaryError(os.str(), res);
    }
    const int r = params.r();
    std::vector<double> out(static_cast<std::size_t>(r), 0.0);
    for (int ell = 1; ell <= r; ++ell) {
        const double lo = params.zeta_at(ell - 1), hi = params.zeta_at(ell);
        double s = 0.0;
        for (int j = 0; j <= pair.k(); ++j) {
            const auto uj = static_cast<std::size_t>(j);
            if (!(pair.xi[uj] > lo + 1e-14 && pair.xi[uj] <= hi + 1e-14)) continue;
            const double prev = j == 0 ? 0.0 : pair.xi[uj - 1];
            s += (pair.xi[uj] - prev) * pair.x[uj] * pair.x[uj];
        }
        const double g = params.gamma_at(ell);
        out[static_cast<std::size_t>(ell - 1)] = ell < r ? -g * s : g * (1.0 - s);
    }
    return out;
}

}  // namespace msparisi
