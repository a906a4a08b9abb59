#include "msparisi/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace msparisi {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool in_zeta(double v, const ModelParams& params) {
    return std::any_of(params.zeta.begin(), params.zeta.end(), [v](double z) { return std::abs(z - v) < 1e-12; });
}

// Strictly increasing x with gaps >= min_gap, first entry >= min_gap, last <= 1 - min_gap.
ParisiPair spaced_pair(const ModelParams& params, int extra, CheckRng& rng, double min_gap) {
    for (;;) {
        ParisiPair p = random_pair(params, extra, rng);
        const int k = p.k();
        bool ok = p.x[1] >= min_gap && p.x[static_cast<std::size_t>(k)] <= 1.0 - min_gap;
        for (int j = 2; j <= k && ok; ++j)
            ok = p.x[static_cast<std::size_t>(j)] - p.x[static_cast<std::size_t>(j - 1)] >= min_gap;
        if (ok) return p;
    }
}

CheckResult finish(CheckResult r, Clock::time_point t0) {
    r.seconds = since(t0);
    return r;
}

}  // namespace

ModelParams random_model(CheckRng& rng, int r, double gamma_min, double gamma_max, bool zero_field) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ModelParams p;
    for (;;) {
        std::vector<double> z;
        for (int i = 0; i < r; ++i) z.push_back(0.05 + 0.9 * u(rng));
        std::sort(z.begin(), z.end());
        bool ok = true;
        for (int i = 1; i < r; ++i) ok = ok && z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(i - 1)] >= 0.05;
        if (!ok || 1.0 - z.back() < 0.05) continue;
        z.push_back(1.0);
        p.zeta = z;
        break;
    }
    for (;;) {
        std::vector<double> g;
        for (int i = 0; i < r; ++i) g.push_back(gamma_min + (gamma_max - gamma_min) * u(rng));
        std::sort(g.begin(), g.end());
        bool ok = true;
        for (int i = 1; i < r; ++i) ok = ok && g[static_cast<std::size_t>(i)] - g[static_cast<std::size_t>(i - 1)] >= 0.02;
        if (!ok) continue;
        p.gamma = g;
        break;
    }
    if (zero_field) {
        p.field = FieldLaw::point_mass(0.0);
    } else {
        const double a = 0.6 * u(rng);
        const double w = 0.2 + 0.6 * u(rng);
        p.field = FieldLaw{{{-a, w}, {a + 0.1, 1.0 - w}}};
    }
    return p;
}

ParisiPair random_pair(const ModelParams& params, int extra, CheckRng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xi(params.zeta.begin(), params.zeta.end());
    for (int i = 0; i < extra; ++i) {
        double v = 0.0;
        do v = 0.02 + 0.96 * u(rng);
        while (std::any_of(xi.begin(), xi.end(), [v](double s) { return std::abs(s - v) < 1e-3; }));
        xi.push_back(v);
    }
    std::sort(xi.begin(), xi.end());
    xi.push_back(1.0);
    const std::size_t k = xi.size() - 2;
    std::vector<double> x(k + 2, 0.0);
    std::vector<double> draws(k);
    for (double& d : draws) d = u(rng);
    std::sort(draws.begin(), draws.end());
    for (std::size_t j = 1; j <= k; ++j) x[j] = draws[j - 1];
    x[k + 1] = 1.0;
    return make_pair(std::move(xi), std::move(x), params);
}

DiscreteMeasure random_measure(CheckRng& rng, int max_atoms) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, max_atoms);
    const int n = count(rng);
    std::vector<std::pair<double, double>> atoms;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = 0.05 + u(rng);
        atoms.emplace_back(0.95 * u(rng), w);
        total += w;
    }
    for (auto& a : atoms) a.second /= total;
    return DiscreteMeasure::from_atoms(atoms);
}

double gradient_relative_error(double g, double fd, double floor) {
    return std::abs(g - fd) / std::max(std::abs(fd), floor);
}

CheckResult check_trivial_anchor(int n_models, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    CheckRng rng(seed);
    std::uniform_int_distribution<int> pick_r(1, 3), pick_extra(0, 3);
    CheckResult res{"trivial_anchor", 0.0, tol, false, "", 0.0};
    for (int i = 0; i < n_models; ++i) {
        const ModelParams params = random_model(rng, pick_r(rng));
        ParisiPair pair = random_pair(params, pick_extra(rng), rng);
        std::fill(pair.x.begin(), pair.x.end() - 1, 0.0);
        const double v = evaluate(pair, params);
        const double target = std::numbers::ln2 + 0.5 * params.gamma_r() * params.gamma_r();
        res.measured = std::max(res.measured, std::abs(v - target));
    }
    res.pass = res.measured < tol;
    res.detail = std::to_string(n_models) + " random zero-field models, all-zero x";
    return finish(res, t0);
}

CheckResult check_oracle(int n_pairs, int k_max, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    CheckRng rng(seed);
    CheckResult res{"oracle_equivalence", 0.0, tol, false, "", 0.0};
    std::uniform_int_distribution<int> pick_r(1, std::min(3, k_max));
    std::bernoulli_distribution with_field(0.3);
    for (int i = 0; i < n_pairs; ++i) {
        const int r = pick_r(rng);
        const ModelParams params = random_model(rng, r, 0.2, 1.4, !with_field(rng));
        std::uniform_int_distribution<int> pick_extra(0, k_max - r);
        const ParisiPair pair = random_pair(params, pick_extra(rng), rng);
        const double a = evaluate(pair, params);
        const double b = evaluate_oracle(pair, params, NumericsConfig{});
        res.measured = std::max(res.measured, std::abs(a - b));
    }
    res.pass = res.measured < tol;
    res.detail = std::to_string(n_pairs) + " random pairs with k <= " + std::to_string(k_max);
    return finish(res, t0);
}

CheckResult check_gradient_fd(int n_pairs, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    constexpr double kStep = 1e-5;
    CheckRng rng(seed);
    CheckResult res{"gradient_fd", 0.0, tol, false, "", 0.0};
    std::uniform_int_distribution<int> pick_r(1, 2), pick_extra(0, 3);
    std::bernoulli_distribution with_field(0.3);
    for (int i = 0; i < n_pairs; ++i) {
        const ModelParams params = random_model(rng, pick_r(rng), 0.2, 1.4, !with_field(rng));
        const ParisiPair pair = spaced_pair(params, pick_extra(rng), rng, 1e-3);
        const auto g = grad_x(pair, params);
        for (int j = 1; j <= pair.k(); ++j) {
            ParisiPair up = pair, dn = pair;
            up.x[static_cast<std::size_t>(j)] += kStep;
            dn.x[static_cast<std::size_t>(j)] -= kStep;
            const double fd = (evaluate(up, params) - evaluate(dn, params)) / (2.0 * kStep);
            res.measured = std::max(res.measured, gradient_relative_error(g[static_cast<std::size_t>(j - 1)], fd));
        }
    }
    res.pass = res.measured < tol;
    res.detail = std::to_string(n_pairs) + " random pairs, central differences, relative error floor 1e-3";
    return finish(res, t0);
}

CheckResult check_annealed_value(const OptimReport& report, const ModelParams& params, double tol, double x_tol) {
    const auto t0 = Clock::now();
    const double target = std::numbers::ln2 + 0.5 * params.gamma_r() * params.gamma_r();
    CheckResult res{"annealed_value", std::abs(report.value - target), tol, false, "", 0.0};
    double xmax = 0.0;
    for (std::size_t j = 0; j + 1 < report.pair.x.size(); ++j) xmax = std::max(xmax, report.pair.x[j]);
    res.pass = report.converged && res.measured < tol && xmax < x_tol;
    std::ostringstream d;
    d.precision(10);
    d << "value " << report.value << ", target " << target << ", max x " << xmax;
    res.detail = d.str();
    return finish(res, t0);
}

CheckResult check_below_annealed(const OptimReport& report, const ModelParams& params, double margin) {
    const auto t0 = Clock::now();
    const double annealed = std::numbers::ln2 + 0.5 * params.gamma_r() * params.gamma_r();
    CheckResult res{"below_annealed", report.value, annealed - margin, false, "", 0.0};
    res.pass = report.converged && report.value < annealed - margin;
    std::ostringstream d;
    d.precision(10);
    d << "value " << report.value << ", annealed " << annealed;
    res.detail = d.str();
    return finish(res, t0);
}

double rs_curvature_fd(const ModelParams& params) {
    constexpr double h = 1e-3;
    const double f0 = rs_profile(0.0, params), f1 = rs_profile(h, params);
    const double f2 = rs_profile(2.0 * h, params), f3 = rs_profile(3.0 * h, params);
    return (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h);
}

CheckResult check_curvature(const ModelParams& params, double formula, double tol) {
    const auto t0 = Clock::now();
    const double fd = rs_curvature_fd(params);
    CheckResult res{"curvature", fd, formula, std::abs(fd - formula) < tol, "", 0.0};
    std::ostringstream d;
    d << "gamma_r^2 " << params.gamma_r() * params.gamma_r() << ", fd " << fd << ", formula " << formula;
    res.detail = d.str();
    return finish(res, t0);
}

CheckResult check_rsb_support(const OptimReport& report, const ModelParams& params, int min_support, double moment_min,
                              double res_tol) {
    const auto t0 = Clock::now();
    CheckResult res{"rsb_support", 0.0, moment_min, false, "", 0.0};
    if (!report.converged) {
        res.detail = "report not converged";
        return finish(res, t0);
    }
    const PhaseLabel label = classify_phase(report, params);
    double min_moment = 1.0;
    std::ostringstream d;
    d << "support points " << label.distinct_support_points << ", residual " << report.residual << ", moments";
    for (const auto& [ell, m] : label.conditional_moments) {
        min_moment = std::min(min_moment, m);
        d << " " << ell << ":" << m;
    }
    res.measured = min_moment;
    res.pass = report.residual < res_tol && label.distinct_support_points >= min_support && min_moment > moment_min;
    res.detail = d.str();
    return finish(res, t0);
}

CheckResult check_plateau(const OptimReport& report, const ModelParams& params, int ell) {
    const auto t0 = Clock::now();
    const PlateauCheck pc = plateau_bound_check(report, params, ell);
    CheckResult res{"plateau_bound", pc.delta, pc.rhs, report.converged && pc.applicable && pc.holds, "", 0.0};
    std::ostringstream d;
    d << "ell " << ell << ", applicable " << (pc.applicable ? "yes" : "no") << ", delta " << pc.delta << ", rhs " << pc.rhs;
    res.detail = d.str();
    return finish(res, t0);
}

CheckResult check_lipschitz(const ModelParams& params, int n_pairs, std::uint64_t seed, double slack) {
    const auto t0 = Clock::now();
    CheckRng rng(seed);
    CheckResult res{"lipschitz", -1.0, slack, false, "", 0.0};
    const double L = 2.0 * params.gamma_r() * params.gamma_r();
    for (int i = 0; i < n_pairs; ++i) {
        const DiscreteMeasure a = random_measure(rng, 4), b = random_measure(rng, 4);
        const double pa = evaluate(measure_to_pair(a, params), params);
        const double pb = evaluate(measure_to_pair(b, params), params);
        res.measured = std::max(res.measured, std::abs(pa - pb) - L * wasserstein1(a, b));
    }
    res.pass = res.measured <= slack;
    res.detail = std::to_string(n_pairs) + " random measure pairs; measured = max(|dP| - 2 gamma_r^2 W1)";
    return finish(res, t0);
}

CheckResult check_ordering(const OptimReport& report, const ModelParams& params, double tol) {
    const auto t0 = Clock::now();
    CheckResult res{"moment_ordering", 0.0, tol, false, "", 0.0};
    const DiscreteMeasure mu = pair_to_measure(report.pair);
    double worst = 0.0;
    for (int ell = 1; ell < params.r(); ++ell)
        worst = std::max(worst, conditional_moment(mu, params, ell, 2) - conditional_moment(mu, params, ell + 1, 2));
    // Support ordering of the conditional laws, levels 0..r.
    const SyncCoupling sc = sync_coupling(mu, params);
    bool ordered = true, disjoint = true;
    for (int ell = 0; ell < params.r(); ++ell) {
        double hi = -1.0, lo = 2.0;
        for (const auto& a : sc.pairs) {
            if (a.prob <= 0.0) continue;
            if (a.gamma == params.gamma_at(ell)) hi = std::max(hi, a.x);
            if (a.gamma == params.gamma_at(ell + 1)) lo = std::min(lo, a.x);
        }
        if (hi < 0.0 || lo > 1.5) continue;
        if (hi > lo + tol) ordered = false;
        const bool has_gap = ell >= 1 && gap_delta(mu, params, ell) > tol;
        if (has_gap && !(hi < lo)) disjoint = false;
    }
    res.measured = worst;
    res.pass = worst <= tol && ordered && disjoint;
    res.detail = std::string("moments ") + (worst <= tol ? "nondecreasing" : "not monotone") + ", supports " +
                 (ordered ? "ordered" : "not ordered") + (disjoint ? "" : ", overlap across a positive gap");
    return finish(res, t0);
}

CheckResult check_redundant_level(int n_pairs, std::uint64_t seed, double tol) {
    const auto t0 = Clock::now();
    CheckRng rng(seed);
    CheckResult res{"redundant_level", 0.0, tol, false, "", 0.0};
    std::uniform_int_distribution<int> pick_r(1, 2), pick_extra(1, 3);
    for (int i = 0; i < n_pairs; ++i) {
        const ModelParams params = random_model(rng, pick_r(rng));
        const ParisiPair pair = random_pair(params, pick_extra(rng), rng);
        std::vector<std::size_t> free;
        for (std::size_t j = 0; j + 2 < pair.xi.size(); ++j)
            if (!in_zeta(pair.xi[j], params)) free.push_back(j);
        std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
        const std::size_t j = free[pick(rng)];
        std::vector<double> xi = pair.xi, x = pair.x;
        xi.insert(xi.begin() + static_cast<std::ptrdiff_t>(j), xi[j]);
        x.insert(x.begin() + static_cast<std::ptrdiff_t>(j), x[j]);
        const ParisiPair dup = make_pair(xi, x, params);
        res.measured = std::max(res.measured, std::abs(evaluate(dup, params) - evaluate(pair, params)));
    }
    res.pass = res.measured < tol;
    res.detail = std::to_string(n_pairs) + " random pairs with one duplicated non-anchor level";
    return finish(res, t0);
}

}  // namespace msparisi
