#include "msparisi/finite_n.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "msparisi/parallel.hpp"
#include "msparisi/quadrature.hpp"

namespace msparisi {

namespace {

constexpr int kMaxExactN = 20;
constexpr int kMaxNestedN = 14;

using Rng = std::mt19937_64;

std::size_t sq(int N) { return static_cast<std::size_t>(N) * static_cast<std::size_t>(N); }

double draw_field(const FieldLaw& law, Rng& rng) {
    if (law.atoms.size() == 1) return law.atoms.front().first;
    std::vector<double> probs;
    for (const auto& [v, p] : law.atoms) probs.push_back(p);
    std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
    return law.atoms[pick(rng)].first;
}

// Symmetrized couplings A = (J + J^T) / 2, so that the energy is
// sum_i A_ii + sum_{i != j} A_ij s_i s_j + sum_i h_i s_i.
struct Couplings {
    int N = 0;
    std::vector<double> a;
    std::vector<double> h;
};

Couplings symmetrize(int N, const std::vector<double>& J, const std::vector<double>& h) {
    Couplings c{N, std::vector<double>(sq(N)), h};
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            c.a[static_cast<std::size_t>(i * N + j)] =
                0.5 * (J[static_cast<std::size_t>(i * N + j)] + J[static_cast<std::size_t>(j * N + i)]);
    return c;
}

// Fills expo[s] = -E(sigma(s)) where sigma(s) is decoded from the Gray code s ^ (s >> 1)
// (bit i set means sigma_i = -1). Returns the maximum exponent.
double enumerate_exponents(const Couplings& c, std::vector<double>& expo) {
    const int N = c.N;
    const std::size_t states = std::size_t{1} << N;
    expo.resize(states);
    std::vector<double> sigma(static_cast<std::size_t>(N), 1.0), local(static_cast<std::size_t>(N), 0.0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            if (j != i) local[static_cast<std::size_t>(i)] += c.a[static_cast<std::size_t>(i * N + j)];
    // All spins up: diagonal + sum_{i != j} A_ij + sum_i h_i.
    double energy = 0.0;
    for (int i = 0; i < N; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        energy += c.a[ui * static_cast<std::size_t>(N) + ui] + local[ui] + c.h[ui];
    }
    double best = -energy;
    expo[0] = -energy;
    for (std::size_t s = 1; s < states; ++s) {
        const auto k = static_cast<std::size_t>(std::countr_zero(s));
        const double old = sigma[k];
        // Flipping sigma_k changes the pair sum by -4 sigma_k local_k and the field term by -2 sigma_k h_k.
        energy += -4.0 * old * local[k] - 2.0 * old * c.h[k];
        sigma[k] = -old;
        const double delta = 2.0 * sigma[k];
        for (int j = 0; j < N; ++j)
            if (static_cast<std::size_t>(j) != k)
                local[static_cast<std::size_t>(j)] += c.a[static_cast<std::size_t>(j) * static_cast<std::size_t>(N) + k] * delta;
        expo[s] = -energy;
        best = std::max(best, -energy);
    }
    return best;
}

double log_sum_from(const std::vector<double>& expo, double top) {
    double s = 0.0;
    for (double e : expo) s += std::exp(e - top);
    return top + std::log(s);
}

// <sigma_i sigma_j> under the Boltzmann weights, row-major N x N.
void boltzmann_correlations(int N, const std::vector<double>& expo, double log_z, std::vector<double>& corr) {
    corr.assign(sq(N), 0.0);
    std::vector<double> sigma(static_cast<std::size_t>(N));
    for (std::size_t s = 0; s < expo.size(); ++s) {
        const double w = std::exp(expo[s] - log_z);
        const std::size_t g = s ^ (s >> 1);
        for (int i = 0; i < N; ++i) sigma[static_cast<std::size_t>(i)] = (g >> i) & 1U ? -1.0 : 1.0;
        for (int i = 0; i < N; ++i) {
            const double wi = w * sigma[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < N; ++j)
                corr[static_cast<std::size_t>(i * N + j)] += wi * sigma[static_cast<std::size_t>(j)];
        }
    }
    for (int i = 0; i < N; ++i) {
        corr[static_cast<std::size_t>(i * N + i)] = 1.0;
        for (int j = i + 1; j < N; ++j) corr[static_cast<std::size_t>(j * N + i)] = corr[static_cast<std::size_t>(i * N + j)];
    }
}

double mean_square(const std::vector<double>& m, int N) {
    double s = 0.0;
    for (double v : m) s += v * v;
    return s / static_cast<double>(sq(N));
}

// Delete-one jackknife: n T - (n - 1) mean(T_{-i}). Falls back to T when a
// leave-one-out value is not finite (one sample carrying all the weight).
double jackknife(double full, const std::vector<double>& loo) {
    const auto n = static_cast<double>(loo.size());
    if (loo.size() < 2) return full;
    double s = 0.0;
    for (double v : loo) {
        if (!std::isfinite(v)) return full;
        s += v;
    }
    return n * full - (n - 1.0) * s / n;
}

struct NodeResult {
    double log_z = 0.0;
    std::vector<double> corr;
    double q = 0.0;
};

class NestedSampler {
public:
    NestedSampler(const ModelParams& params, const SimOptions& opts, int ell)
        : params_(params), opts_(opts), ell_(ell), N_(opts.N) {
        for (int l = 1; l <= params.r(); ++l) scale_.push_back(opts.coupling_scale * params.beta(l) / std::sqrt(static_cast<double>(N_)));
    }

    double outer_sample(std::size_t index) const {
        const std::uint64_t seed = mix_seed(opts_.seed, index);
        Rng rng(seed);
        std::vector<double> h(static_cast<std::size_t>(N_));
        for (double& v : h) v = draw_field(params_.field, rng);
        const NodeResult res = node(0, std::vector<double>(sq(N_), 0.0), h, seed);
        const double out = ell_ < 0 ? res.log_z / N_ : res.q;
        if (!std::isfinite(out)) {
            std::ostringstream msg;
            msg << "non-finite estimate for outer sample " << index << " (master seed " << opts_.seed << ", substream " << seed << ")";
            throw SimulationError(msg.str());
        }
        return out;
    }

private:
    bool need_corr(int level) const { return ell_ >= 0 && level >= ell_; }

    int inner_count(int level) const {
        const auto& v = opts_.n_inner;
        return v[std::min(static_cast<std::size_t>(level), v.size() - 1)];
    }

    NodeResult leaf(const std::vector<double>& J, const std::vector<double>& h) const {
        thread_local std::vector<double> expo;
        const Couplings c = symmetrize(N_, J, h);
        const double top = enumerate_exponents(c, expo);
        NodeResult res;
        res.log_z = log_sum_from(expo, top);
        if (need_corr(params_.r())) {
            boltzmann_correlations(N_, expo, res.log_z, res.corr);
            if (ell_ == params_.r()) res.q = mean_square(res.corr, N_);
        }
        return res;
    }

    NodeResult node(int level, const std::vector<double>& J, const std::vector<double>& h, std::uint64_t seed) const {
        if (level == params_.r()) return leaf(J, h);
        const int n = inner_count(level);
        const double zeta = params_.zeta_at(level);
        const double scale = scale_[static_cast<std::size_t>(level)];
        Rng rng(mix_seed(seed, 0x6c65766cULL));
        std::normal_distribution<double> gauss;
        std::vector<NodeResult> kids;
        kids.reserve(static_cast<std::size_t>(n));
        std::vector<double> Jc(J.size());
        for (int i = 0; i < n; ++i) {
            for (std::size_t e = 0; e < J.size(); ++e) Jc[e] = J[e] + scale * gauss(rng);
            kids.push_back(node(level + 1, Jc, h, mix_seed(seed, static_cast<std::uint64_t>(i))));
        }
        return combine(level, zeta, kids);
    }

    NodeResult combine(int level, double zeta, const std::vector<NodeResult>& kids) const {
        const auto n = kids.size();
        double top = -std::numeric_limits<double>::infinity();
        for (const auto& k : kids) top = std::max(top, k.log_z);
        // Tilt weights e_i = Z_i^zeta / max, with prefix/suffix sums for exact leave-one-out totals.
        std::vector<double> w(n), pre(n + 1, 0.0), suf(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(zeta * (kids[i].log_z - top));
        for (std::size_t i = 0; i < n; ++i) pre[i + 1] = pre[i] + w[i];
        for (std::size_t i = n; i-- > 0;) suf[i] = suf[i + 1] + w[i];
        const double W = pre[n];
        std::vector<double> loo_w(n);
        for (std::size_t i = 0; i < n; ++i) loo_w[i] = pre[i] + suf[i + 1];

        NodeResult res;
        {
            const double full = top + std::log(W / static_cast<double>(n)) / zeta;
            std::vector<double> loo(n);
            for (std::size_t i = 0; i < n; ++i)
                loo[i] = top + std::log(loo_w[i] / static_cast<double>(n - 1)) / zeta;
            res.log_z = jackknife(full, loo);
        }
        if (need_corr(level)) {
            const std::size_t m = sq(N_);
            std::vector<double> total(m, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t e = 0; e < m; ++e) total[e] += w[i] * kids[i].corr[e];
            std::vector<double> full(m);
            for (std::size_t e = 0; e < m; ++e) full[e] = total[e] / W;
            // Leave-one-out weighted means; the subtraction is benign because every
            // weight is at most 1 and W >= 1.
            std::vector<std::vector<double>> loo(n, std::vector<double>(m));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t e = 0; e < m; ++e) loo[i][e] = (total[e] - w[i] * kids[i].corr[e]) / loo_w[i];
            res.corr.assign(m, 0.0);
            std::vector<double> loo_e(n);
            for (std::size_t e = 0; e < m; ++e) {
                for (std::size_t i = 0; i < n; ++i) loo_e[i] = loo[i][e];
                res.corr[e] = jackknife(full[e], loo_e);
            }
            if (level == ell_) {
                std::vector<double> loo_q(n);
                for (std::size_t i = 0; i < n; ++i) loo_q[i] = mean_square(loo[i], N_);
                res.q = jackknife(mean_square(full, N_), loo_q);
            }
        }
        if (ell_ >= 0 && level < ell_) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += w[i] * kids[i].q;
            std::vector<double> loo(n);
            for (std::size_t i = 0; i < n; ++i) loo[i] = (total - w[i] * kids[i].q) / loo_w[i];
            res.q = jackknife(total / W, loo);
        }
        return res;
    }

    const ModelParams& params_;
    const SimOptions& opts_;
    int ell_;
    int N_;
    std::vector<double> scale_;
};

void check_options(const ModelParams& params, const SimOptions& opts) {
    require_valid(params);
    if (opts.N < 1 || opts.N > kMaxNestedN) throw DomainError("nested simulation needs 1 <= N <= " + std::to_string(kMaxNestedN));
    if (opts.n_outer < 2) throw DomainError("n_outer must be at least 2");
    if (opts.n_inner.empty()) throw DomainError("n_inner must list at least one count");
    for (int n : opts.n_inner)
        if (n < 1) throw DomainError("n_inner entries must be positive");
    if (params.r() > 2 && !opts.allow_deep)
        throw DomainError("nesting depth r > 2 is expensive; set allow_deep to run it");
    if (!(opts.coupling_scale >= 0.0)) throw DomainError("coupling_scale must be nonnegative");
}

SimEstimate run(const ModelParams& params, const SimOptions& opts, int ell) {
    check_options(params, opts);
    const NestedSampler sampler(params, opts, ell);
    const auto n = static_cast<std::size_t>(opts.n_outer);
    std::vector<double> values(n);
    parallel_for(n, [&](std::size_t i) { values[i] = sampler.outer_sample(i); });
    SimEstimate est;
    est.mean = pairwise_sum(values) / static_cast<double>(n);
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = (values[i] - est.mean) * (values[i] - est.mean);
    est.std_error = std::sqrt(pairwise_sum(dev) / static_cast<double>(n - 1) / static_cast<double>(n));
    est.n_outer = opts.n_outer;
    for (int l = 0; l < params.r(); ++l)
        est.n_inner.push_back(opts.n_inner[std::min(static_cast<std::size_t>(l), opts.n_inner.size() - 1)]);
    est.seed = opts.seed;
    return est;
}

}  // namespace

DisorderSample draw_disorder(const ModelParams& params, int N, std::uint64_t seed) {
    require_valid(params);
    if (N < 1) throw DomainError("N must be positive");
    DisorderSample s;
    s.N = N;
    s.seed = seed;
    Rng rng(seed);
    std::normal_distribution<double> gauss;
    for (int l = 0; l < params.r(); ++l) {
        std::vector<double> g(sq(N));
        for (double& v : g) v = gauss(rng);
        s.g.push_back(std::move(g));
    }
    s.h.resize(static_cast<std::size_t>(N));
    for (double& v : s.h) v = draw_field(params.field, rng);
    return s;
}

double exact_log_partition(const ModelParams& params, const DisorderSample& sample) {
    const int N = sample.N;
    if (N < 1 || N > kMaxExactN) throw DomainError("exact enumeration needs 1 <= N <= " + std::to_string(kMaxExactN));
    if (static_cast<int>(sample.g.size()) != params.r() || sample.h.size() != static_cast<std::size_t>(N))
        throw DomainError("disorder sample does not match the model");
    std::vector<double> J(sq(N), 0.0);
    const double inv = 1.0 / std::sqrt(static_cast<double>(N));
    for (int l = 1; l <= params.r(); ++l) {
        const auto& g = sample.g[static_cast<std::size_t>(l - 1)];
        if (g.size() != sq(N)) throw DomainError("coupling array has the wrong size");
        for (std::size_t e = 0; e < J.size(); ++e) J[e] += params.beta(l) * inv * g[e];
    }
    std::vector<double> expo;
    const double top = enumerate_exponents(symmetrize(N, J, sample.h), expo);
    return log_sum_from(expo, top);
}

double annealed_log_partition_per_spin(const ModelParams& params, const DisorderSample& sample) {
    const int N = sample.N;
    if (N < 1 || N > kMaxExactN) throw DomainError("exact enumeration needs 1 <= N <= " + std::to_string(kMaxExactN));
    // E_g exp(-H(sigma)) = exp(Var H(sigma) / 2) with Var H(sigma) = N gamma_r^2 for every sigma.
    double var_coef = 0.0;
    for (int l = 1; l <= params.r(); ++l) var_coef += params.beta(l) * params.beta(l);
    std::vector<double> expo;
    const Couplings c = symmetrize(N, std::vector<double>(sq(N), 0.0), sample.h);
    const double top = enumerate_exponents(c, expo);
    const double nn = static_cast<double>(N);
    return (log_sum_from(expo, top) + 0.5 * var_coef * nn) / nn;
}

double single_spin_pressure(const ModelParams& params) {
    require_valid(params);
    // With sigma^2 = 1 every level is a Gaussian shift of log Z, integrated by its m.g.f.
    double v = 0.0;
    for (const auto& [h, w] : params.field.atoms) v += w * log2cosh(h);
    for (int l = 1; l <= params.r(); ++l) v += 0.5 * params.zeta_at(l - 1) * params.beta(l) * params.beta(l);
    return v;
}

SimEstimate nested_pressure(const ModelParams& params, const SimOptions& opts) { return run(params, opts, -1); }

SimEstimate overlap_moment_sim(const ModelParams& params, int ell, const SimOptions& opts) {
    if (ell < 0 || ell > params.r()) throw DomainError("ell must lie in [0, r]");
    return run(params, opts, ell);
}

}  // namespace msparisi
