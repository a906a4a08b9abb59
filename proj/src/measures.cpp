#include "msparisi/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msparisi/parisi.hpp"

namespace msparisi {

namespace {

// CDF levels closer than this are treated as the same breakpoint.
constexpr double kSnap = 1e-14;

// First index i with m_i >= p - kSnap.
std::size_t quantile_index(const std::vector<double>& m, double p) {
    auto it = std::lower_bound(m.begin(), m.end(), p - kSnap);
    if (it == m.end()) return m.size() - 1;
    return static_cast<std::size_t>(it - m.begin());
}

// First index i with m_i > p + kSnap.
std::size_t right_index(const std::vector<double>& m, double p) {
    auto it = std::upper_bound(m.begin(), m.end(), p + kSnap);
    if (it == m.end()) return m.size() - 1;
    return static_cast<std::size_t>(it - m.begin());
}

struct Breakpoint {
    double value;
    bool anchor;
};

// Sorted union of the measure's CDF levels and the zeta anchors, merged at kSnap.
// A merged point keeps the exact anchor value when one is involved.
std::vector<Breakpoint> merged_breakpoints(const std::vector<double>& m, const std::vector<double>& zeta) {
    std::vector<Breakpoint> pts;
    pts.reserve(m.size() + zeta.size());
    for (double v : m) pts.push_back({v, false});
    for (double v : zeta) pts.push_back({v, true});
    std::sort(pts.begin(), pts.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.value < b.value; });
    std::vector<Breakpoint> out;
    for (const auto& p : pts) {
        if (!out.empty() && p.value - out.back().value <= kSnap) {
            if (p.anchor && !out.back().anchor) out.back() = p;
            continue;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

DiscreteMeasure DiscreteMeasure::from_atoms(std::vector<std::pair<double, double>> atoms) {
    double total = 0.0;
    for (const auto& [v, w] : atoms) {
        if (!std::isfinite(v) || v < 0.0 || v >= 1.0) {
            std::ostringstream os;
            os << "measure atom " << v << " outside [0,1)";
            throw DomainError(os.str());
        }
        if (!std::isfinite(w) || w < 0.0) throw DomainError("measure weights must be finite and nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "measure weights sum to " << total << ", expected 1";
        throw DomainError(os.str());
    }
    std::sort(atoms.begin(), atoms.end());
    DiscreteMeasure mu;
    mu.y_.clear();
    mu.m_.clear();
    double acc = 0.0;
    for (const auto& [v, w] : atoms) {
        if (w <= 0.0) continue;
        acc += w / total;
        if (!mu.y_.empty() && v - mu.y_.back() <= kSnap) {
            mu.m_.back() = acc;
        } else {
            mu.y_.push_back(v);
            mu.m_.push_back(acc);
        }
    }
    mu.m_.back() = 1.0;
    return mu;
}

std::vector<std::pair<double, double>> DiscreteMeasure::weighted_atoms() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) out.emplace_back(y_[i], weight(i));
    return out;
}

double DiscreteMeasure::cdf_at(double s) const {
    auto it = std::upper_bound(y_.begin(), y_.end(), s);
    if (it == y_.begin()) return 0.0;
    return m_[static_cast<std::size_t>(it - y_.begin()) - 1];
}

double quantile(const DiscreteMeasure& mu, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "quantile level " << p << " outside [0,1]";
        throw DomainError(os.str());
    }
    if (p == 0.0) return 0.0;
    const auto& m = mu.cdf();
    auto it = std::lower_bound(m.begin(), m.end(), p);
    if (it == m.end()) return mu.atoms().back();
    return mu.atoms()[static_cast<std::size_t>(it - m.begin())];
}

double quantile_right(const DiscreteMeasure& mu, double p) {
    if (!(p >= 0.0 && p < 1.0)) throw DomainError("right quantile level outside [0,1)");
    const auto& m = mu.cdf();
    auto it = std::upper_bound(m.begin(), m.end(), p);
    if (it == m.end()) return mu.atoms().back();
    return mu.atoms()[static_cast<std::size_t>(it - m.begin())];
}

double wasserstein1(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2) {
    std::vector<double> bps(mu1.cdf());
    bps.insert(bps.end(), mu2.cdf().begin(), mu2.cdf().end());
    std::sort(bps.begin(), bps.end());
    double total = 0.0, prev = 0.0;
    for (double b : bps) {
        const double len = b - prev;
        if (len <= 0.0) continue;
        // Both quantiles are constant on (prev, b].
        const double mid = 0.5 * (prev + b);
        total += len * std::abs(quantile(mu1, mid) - quantile(mu2, mid));
        prev = b;
    }
    return total;
}

ParisiPair make_pair(std::vector<double> xi, std::vector<double> x, const ModelParams& params) {
    if (xi.size() != x.size()) throw DomainError("xi and x must have equal length");
    if (xi.size() < 2) throw DomainError("pair needs at least two levels");
    ParisiPair pair;
    pair.gamma_tilde = effective_gammas(xi, params);
    pair.xi = std::move(xi);
    pair.x = std::move(x);
    return pair;
}

std::vector<std::string> validate_pair(const ParisiPair& pair, const ModelParams& params) {
    std::vector<std::string> v;
    const auto n = pair.xi.size();
    if (n < 2 || pair.x.size() != n || pair.gamma_tilde.size() != n) {
        v.emplace_back("xi, x and gamma_tilde must have equal length >= 2");
        return v;
    }
    const std::size_t k = n - 2;
    for (std::size_t j = 0; j < n; ++j) {
        if (!(pair.xi[j] > 0.0 && pair.xi[j] <= 1.0)) {
            v.emplace_back("xi entries must lie in (0,1]");
            break;
        }
    }
    for (std::size_t j = 1; j < n; ++j)
        if (pair.xi[j] < pair.xi[j - 1]) {
            v.emplace_back("xi not nondecreasing");
            break;
        }
    if (pair.xi[k] != 1.0 || pair.xi[k + 1] != 1.0) v.emplace_back("xi_k and xi_{k+1} must equal 1");
    for (std::size_t j = 0; j < n; ++j)
        if (!(pair.x[j] >= 0.0 && pair.x[j] <= 1.0)) {
            v.emplace_back("x entries must lie in [0,1]");
            break;
        }
    for (std::size_t j = 1; j < n; ++j)
        if (pair.x[j] < pair.x[j - 1]) {
            v.emplace_back("x not nondecreasing");
            break;
        }
    if (pair.x[k + 1] != 1.0) v.emplace_back("x_{k+1} must equal 1");
    for (double z : params.zeta) {
        const bool found = std::any_of(pair.xi.begin(), pair.xi.end(),
                                       [z](double s) { return std::abs(s - z) <= kSnap; });
        if (!found) {
            v.emplace_back("zeta not contained in xi");
            break;
        }
    }
    for (std::size_t j = 1; j < n; ++j) {
        const double a = pair.gamma_tilde[j] * pair.gamma_tilde[j] * pair.x[j];
        const double b = pair.gamma_tilde[j - 1] * pair.gamma_tilde[j - 1] * pair.x[j - 1];
        if (a < b - 1e-14) {
            v.emplace_back("gamma_tilde^2 x not nondecreasing");
            break;
        }
    }
    return v;
}

ParisiPair measure_to_pair(const DiscreteMeasure& mu, const ModelParams& params) {
    const auto pts = merged_breakpoints(mu.cdf(), params.zeta);
    std::vector<double> xi, x;
    xi.reserve(pts.size() + 1);
    x.reserve(pts.size() + 1);
    for (const auto& p : pts) {
        xi.push_back(p.value);
        x.push_back(mu.atoms()[quantile_index(mu.cdf(), p.value)]);
    }
    xi.push_back(1.0);
    x.push_back(1.0);
    return make_pair(std::move(xi), std::move(x), params);
}

DiscreteMeasure pair_to_measure(const ParisiPair& pair) {
    std::vector<std::pair<double, double>> atoms;
    const int k = pair.k();
    double prev = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double w = pair.xi[static_cast<std::size_t>(j)] - prev;
        prev = pair.xi[static_cast<std::size_t>(j)];
        if (w > 0.0) atoms.emplace_back(pair.x[static_cast<std::size_t>(j)], w);
    }
    return DiscreteMeasure::from_atoms(std::move(atoms));
}

double conditional_moment(const DiscreteMeasure& mu, const ModelParams& params, int ell, int power) {
    if (ell < 1 || ell > params.r()) throw DomainError("conditional_moment level outside 1..r");
    if (power < 0) throw DomainError("conditional_moment power must be nonnegative");
    const auto pair = measure_to_pair(mu, params);
    const double lo = params.zeta_at(ell - 1), hi = params.zeta_at(ell);
    double s = 0.0;
    for (int j = 0; j <= pair.k(); ++j) {
        const double xj = pair.xi[static_cast<std::size_t>(j)];
        if (!(xj > lo && xj <= hi)) continue;
        const double prev = j == 0 ? 0.0 : pair.xi[static_cast<std::size_t>(j - 1)];
        s += (xj - prev) * std::pow(pair.x[static_cast<std::size_t>(j)], power);
    }
    return s / (hi - lo);
}

double gap_delta(const DiscreteMeasure& mu, const ModelParams& params, int ell) {
    if (ell < 0 || ell > params.r() - 1) throw DomainError("gap level outside 0..r-1");
    const double p = params.zeta_at(ell);
    const auto& y = mu.atoms();
    return y[right_index(mu.cdf(), p)] - y[quantile_index(mu.cdf(), p)];
}

SyncCoupling sync_coupling(const DiscreteMeasure& mu, const ModelParams& params) {
    const auto pts = merged_breakpoints(mu.cdf(), params.zeta);
    SyncCoupling c;
    double prev = 0.0;
    for (const auto& p : pts) {
        const double len = p.value - prev;
        prev = p.value;
        if (len <= 0.0) continue;
        const double xv = mu.atoms()[quantile_index(mu.cdf(), p.value)];
        const double gv = params.gamma_at(static_cast<int>(quantile_index(params.zeta, p.value)));
        if (!c.pairs.empty() && c.pairs.back().x == xv && c.pairs.back().gamma == gv)
            c.pairs.back().prob += len;
        else
            c.pairs.push_back({xv, gv, len});
    }
    return c;
}

}  // namespace msparisi
