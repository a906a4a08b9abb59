#include "msparisi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace msparisi {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktrack = 40;
// Value increases tolerated before the damped iteration hands over to projected gradient.
constexpr int kUphillLimit = 3;
constexpr double kRefineStop = 1e-7;
// Changes in the value below this are evaluation noise, not ascent.
constexpr double kValueNoise = 1e-11;
constexpr double kSnap = 1e-14;

struct Problem {
    std::vector<double> xi;
    const ModelParams* params;
    const NumericsConfig* num;
    std::vector<double> gamma_tilde;
    std::vector<double> weight;  // gt_j^2 (xi_j - xi_{j-1}), j = 0..k
    int first_free = 1;          // levels below carry gamma_tilde = 0 and stay at 0
    int k = 0;
};

Problem make_problem(const std::vector<double>& xi, const ModelParams& params, const NumericsConfig& num) {
    Problem pb{xi, &params, &num, effective_gammas(xi, params), {}, 1, static_cast<int>(xi.size()) - 2};
    if (pb.k < 1) throw DomainError("xi must contain at least one level below the trailing 1");
    pb.weight.assign(xi.size(), 0.0);
    for (int j = 1; j <= pb.k; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        pb.weight[uj] = pb.gamma_tilde[uj] * pb.gamma_tilde[uj] * (xi[uj] - xi[uj - 1]);
    }
    while (pb.first_free <= pb.k && pb.gamma_tilde[static_cast<std::size_t>(pb.first_free)] == 0.0) ++pb.first_free;
    return pb;
}

// Weighted projection of y (indices 0..k+1) onto the feasible set.
std::vector<double> project(const Problem& pb, const std::vector<double>& y) {
    std::vector<double> x(y.size(), 0.0);
    x.back() = 1.0;
    if (pb.first_free > pb.k) return x;
    std::vector<double> v, w;
    double wmax = 0.0;
    for (int j = pb.first_free; j <= pb.k; ++j) wmax = std::max(wmax, pb.weight[static_cast<std::size_t>(j)]);
    const double floor = std::max(wmax, 1.0) * 1e-12;
    for (int j = pb.first_free; j <= pb.k; ++j) {
        v.push_back(y[static_cast<std::size_t>(j)]);
        w.push_back(std::max(pb.weight[static_cast<std::size_t>(j)], floor));
    }
    const auto fit = isotonic_fit(v, w);
    for (int j = pb.first_free; j <= pb.k; ++j)
        x[static_cast<std::size_t>(j)] = std::clamp(fit[static_cast<std::size_t>(j - pb.first_free)], 0.0, 1.0);
    return x;
}

struct Iterate {
    ParisiPair pair;
    ParisiEvaluation ev;
};

Iterate evaluate_at(const Problem& pb, const std::vector<double>& x) {
    ParisiPair pair{pb.xi, x, pb.gamma_tilde};
    auto ev = evaluate_full(pair, *pb.params, *pb.num);
    return {std::move(pair), std::move(ev)};
}

// sum_j g_j (x'_j - x_j) with g_j = w_j (x_j - a_j).
double directional(const Problem& pb, const Iterate& it, const std::vector<double>& xn) {
    double s = 0.0;
    for (int j = pb.first_free; j <= pb.k; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        s += pb.weight[uj] * (it.pair.x[uj] - it.ev.targets[uj]) * (xn[uj] - it.pair.x[uj]);
    }
    return s;
}

OptimReport run_start(const Problem& pb, std::vector<double> x0, const OptimizeOptions& opts, const std::string& name) {
    Iterate cur = evaluate_at(pb, project(pb, x0));
    Iterate best = cur;
    bool gradient_mode = false;
    int uphill = 0, stable = 0, it = 0;
    bool converged = false;
    OptimReport rep;
    rep.start = name;
    for (; it < opts.max_iter; ++it) {
        if (cur.ev.residual < opts.tol && stable >= opts.stable_iters) {
            converged = true;
            break;
        }
        // A fixed point with zero residual needs no further value checks.
        if (cur.ev.residual == 0.0) {
            converged = true;
            break;
        }
        Iterate next;
        if (!gradient_mode) {
            std::vector<double> y(cur.pair.x);
            for (int j = pb.first_free; j <= pb.k; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                y[uj] = (1.0 - opts.damping) * cur.pair.x[uj] + opts.damping * cur.ev.targets[uj];
            }
            next = evaluate_at(pb, project(pb, y));
            if (next.ev.value > cur.ev.value + kValueNoise) {
                if (++uphill >= kUphillLimit) gradient_mode = true;
            } else {
                uphill = 0;
            }
        } else {
            double t = 1.0;
            bool accepted = false;
            for (int b = 0; b < kMaxBacktrack; ++b, t *= 0.5) {
                std::vector<double> y(cur.pair.x);
                for (int j = pb.first_free; j <= pb.k; ++j) {
                    const auto uj = static_cast<std::size_t>(j);
                    y[uj] += t * (cur.ev.targets[uj] - cur.pair.x[uj]);
                }
                const auto xn = project(pb, y);
                next = evaluate_at(pb, xn);
                if (next.ev.value <= cur.ev.value + kArmijo * directional(pb, cur, xn) + kValueNoise) {
                    accepted = true;
                    break;
                }
            }
            rep.used_fallback = true;
            if (!accepted) break;
        }
        stable = std::abs(next.ev.value - cur.ev.value) < opts.value_tol ? stable + 1 : 0;
        cur = std::move(next);
        if (cur.ev.value < best.ev.value) best = cur;
    }
    const Iterate& out = converged ? cur : best;
    rep.pair = out.pair;
    rep.value = out.ev.value;
    rep.residual = out.ev.residual;
    rep.iterations = it;
    rep.converged = converged;
    rep.refinement_history = {{pb.k, out.ev.value}};
    return rep;
}

std::vector<double> initial_x(const Problem& pb, InitKind kind) {
    std::vector<double> x(pb.xi.size(), 0.0);
    x.back() = 1.0;
    if (kind == InitKind::linear)
        for (int j = pb.first_free; j <= pb.k; ++j) x[static_cast<std::size_t>(j)] = static_cast<double>(j) / (pb.k + 1);
    return x;
}

// Prefer converged reports, then lower values.
bool better(const OptimReport& a, const OptimReport& b) {
    if (a.converged != b.converged) return a.converged;
    return a.value < b.value;
}

}  // namespace

std::vector<double> isotonic_fit(const std::vector<double>& y, const std::vector<double>& w) {
    if (y.size() != w.size()) throw DomainError("isotonic_fit needs equal-length values and weights");
    struct Block {
        double mean, weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(w[i] > 0.0)) throw DomainError("isotonic_fit weights must be positive");
        blocks.push_back({y[i], w[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
            const Block top = blocks.back();
            blocks.pop_back();
            Block& b = blocks.back();
            const double tw = b.weight + top.weight;
            b.mean = (b.mean * b.weight + top.mean * top.weight) / tw;
            b.weight = tw;
            b.count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean);
    return out;
}

OptimReport optimize_x(const std::vector<double>& xi, const ModelParams& params, const NumericsConfig& num,
                       const InitSpec& init, const OptimizeOptions& opts) {
    require_valid(params);
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw DomainError("damping must lie in (0,1]");
    if (opts.max_iter < 1) throw DomainError("max_iter must be positive");
    const Problem pb = make_problem(xi, params, num);
    {
        const auto v = validate_pair(ParisiPair{xi, initial_x(pb, InitKind::zero), pb.gamma_tilde}, params);
        if (!v.empty()) {
            std::string msg = "invalid xi:";
            for (const auto& s : v) msg += " " + s + ";";
            throw DomainError(msg);
        }
    }

    std::vector<std::pair<std::string, std::vector<double>>> starts;
    if (const auto* kind = std::get_if<InitKind>(&init)) {
        starts.emplace_back(*kind == InitKind::zero ? "zero" : "linear", initial_x(pb, *kind));
    } else {
        auto x = std::get<std::vector<double>>(init);
        if (x.size() == xi.size() - 1) x.push_back(1.0);
        if (x.size() != xi.size()) throw DomainError("initial x must have k+1 or k+2 entries");
        starts.emplace_back("warm", std::move(x));
    }
    if (opts.multistart) {
        for (InitKind kind : {InitKind::zero, InitKind::linear}) {
            const std::string name = kind == InitKind::zero ? "zero" : "linear";
            if (starts.front().first != name) starts.emplace_back(name, initial_x(pb, kind));
        }
    }

    OptimReport best;
    bool have = false;
    int total_iters = 0;
    for (const auto& [name, x0] : starts) {
        auto rep = run_start(pb, x0, opts, name);
        total_iters += rep.iterations;
        if (!have || better(rep, best)) {
            best = std::move(rep);
            have = true;
        }
    }
    best.iterations = total_iters;
    return best;
}

std::vector<double> anchored_grid(const ModelParams& params, int per_interval) {
    if (per_interval < 1) throw DomainError("levels per interval must be at least 1");
    std::vector<double> xi{params.zeta_at(0)};
    for (int ell = 1; ell <= params.r(); ++ell) {
        const double lo = params.zeta_at(ell - 1), hi = params.zeta_at(ell);
        for (int i = 1; i < per_interval; ++i) xi.push_back(lo + (hi - lo) * i / per_interval);
        xi.push_back(hi);
    }
    xi.push_back(1.0);
    return xi;
}

OptimReport refine_k(const ModelParams& params, const NumericsConfig& num, const std::vector<int>& schedule,
                     const OptimizeOptions& opts) {
    if (schedule.empty()) throw DomainError("refinement schedule is empty");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (schedule[i] < schedule[i - 1]) throw DomainError("refinement schedule must be nondecreasing");
    OptimReport prev;
    bool have = false;
    std::vector<std::pair<int, double>> history;
    int iterations = 0;
    for (int m : schedule) {
        const auto xi = anchored_grid(params, m);
        OptimReport rep;
        if (have) {
            const auto mu = pair_to_measure(prev.pair);
            std::vector<double> warm;
            for (std::size_t j = 0; j + 1 < xi.size(); ++j) warm.push_back(quantile(mu, xi[j]));
            rep = optimize_x(xi, params, num, warm, opts);
        } else {
            rep = optimize_x(xi, params, num, InitKind::linear, opts);
        }
        iterations += rep.iterations;
        history.emplace_back(rep.pair.k(), rep.value);
        const bool small_gain = have && prev.value - rep.value < kRefineStop;
        prev = std::move(rep);
        have = true;
        if (small_gain) break;
    }
    prev.refinement_history = std::move(history);
    prev.iterations = iterations;
    return prev;
}

std::string to_string(PhaseKind kind) { return kind == PhaseKind::Annealed ? "Annealed" : "RSB"; }

PhaseLabel classify_phase(const OptimReport& report, const ModelParams& params, double eps_support) {
    if (!report.converged) throw DomainError("classify_phase needs a converged report");
    if (!(eps_support > 0.0)) throw DomainError("eps_support must be positive");
    const auto mu = pair_to_measure(report.pair);
    PhaseLabel label;
    const auto& y = mu.atoms();
    bool all_small = true;
    double cluster_start = -std::numeric_limits<double>::infinity();
    for (double v : y) {
        if (v >= eps_support) all_small = false;
        if (v - cluster_start > eps_support) {
            ++label.distinct_support_points;
            if (v >= eps_support) ++label.positive_support_points;
            cluster_start = v;
        }
    }
    label.kind = all_small ? PhaseKind::Annealed : PhaseKind::RSB;
    for (int ell = 0; ell < params.r(); ++ell) label.gaps.emplace_back(ell, gap_delta(mu, params, ell));
    for (int ell = 1; ell <= params.r(); ++ell)
        label.conditional_moments.emplace_back(ell, conditional_moment(mu, params, ell, 2));
    return label;
}

PlateauCheck plateau_bound_check(const DiscreteMeasure& mu, const ModelParams& params, int ell) {
    if (ell < 1 || ell > params.r() - 1) throw DomainError("plateau level outside 1..r-1");
    const double z = params.zeta_at(ell);
    const double g_hi = params.gamma_at(ell + 1), g_lo = params.gamma_at(ell);
    PlateauCheck out;
    out.applicable = z * g_hi * g_hi < 0.5;
    const double left = quantile(mu, std::max(0.0, z - kSnap));
    const double right = quantile_right(mu, std::min(z + kSnap, std::nextafter(1.0, 0.0)));
    out.delta = right - left;
    // int_right^1 F(s) ds with F the CDF, constant between atoms.
    const auto& y = mu.atoms();
    const auto& m = mu.cdf();
    double integral = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = std::max(y[i], right);
        const double b = i + 1 < y.size() ? y[i + 1] : 1.0;
        if (b > a) integral += m[i] * (b - a);
    }
    out.rhs = 2.0 * (g_hi * g_hi - g_lo * g_lo) * left * integral * integral;
    out.holds = out.delta >= out.rhs - 1e-9;
    return out;
}

PlateauCheck plateau_bound_check(const OptimReport& report, const ModelParams& params, int ell) {
    if (!report.converged) throw DomainError("plateau_bound_check needs a converged report");
    return plateau_bound_check(pair_to_measure(report.pair), params, ell);
}

double annealed_curvature(const ModelParams& params) {
    const double z = params.zeta_at(params.r() - 1);
    const double g2 = params.gamma_r() * params.gamma_r();
    return (1.0 - z) * g2 * (1.0 - 2.0 * g2);
}

}  // namespace msparisi
