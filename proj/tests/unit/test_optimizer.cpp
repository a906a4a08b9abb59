#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "msparisi/checks.hpp"
#include "msparisi/optimizer.hpp"

using namespace msparisi;

namespace {

const ModelParams kHot{{0.3, 0.6, 1.0}, {0.4, 0.6}, {}};
const ModelParams kSingle{{0.5, 1.0}, {1.0}, {}};

// Golden-section search of rs_profile over [a, b] after a coarse scan.
double min_profile(const ModelParams& p, double& argmin) {
    double best = 1e300, at = 0.0;
    for (int i = 0; i <= 50; ++i) {
        const double x = i / 50.0, v = rs_profile(x, p);
        if (v < best) best = v, at = x;
    }
    double a = std::max(0.0, at - 0.02), b = std::min(1.0, at + 0.02);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = rs_profile(c, p), fd = rs_profile(d, p);
    while (b - a > 1e-7) {
        if (fc < fd) {
            b = d, d = c, fd = fc;
            c = b - g * (b - a), fc = rs_profile(c, p);
        } else {
            a = c, c = d, fc = fd;
            d = a + g * (b - a), fd = rs_profile(d, p);
        }
    }
    argmin = 0.5 * (a + b);
    return rs_profile(argmin, p);
}

}  // namespace

TEST(AnchoredGrid, ContainsEveryZetaAndTrailingOne) {
    const auto xi = anchored_grid(kHot, 2);
    const std::vector<double> want{0.3, 0.45, 0.6, 0.8, 1.0, 1.0};
    ASSERT_EQ(xi.size(), want.size());
    for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(xi[j], want[j], 1e-15);
}

TEST(IsotonicFit, PoolsViolatorsWithWeights) {
    const auto a = isotonic_fit({3.0, 1.0}, {1.0, 1.0});
    EXPECT_DOUBLE_EQ(a[0], 2.0);
    EXPECT_DOUBLE_EQ(a[1], 2.0);
    const auto b = isotonic_fit({3.0, 1.0}, {1.0, 3.0});
    EXPECT_DOUBLE_EQ(b[0], 1.5);
    EXPECT_DOUBLE_EQ(b[1], 1.5);
}

TEST(IsotonicFit, MonotoneIdempotentAndMeanPreserving) {
    CheckRng rng(201);
    std::uniform_real_distribution<double> u(0.0, 1.0), w(0.1, 2.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> y(12), wt(12);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = u(rng), wt[i] = w(rng);
        const auto f = isotonic_fit(y, wt);
        double sy = 0.0, sf = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            sy += wt[i] * y[i], sf += wt[i] * f[i];
            if (i) {
                EXPECT_LE(f[i - 1], f[i] + 1e-15);
            }
        }
        EXPECT_NEAR(sy, sf, 1e-12);
        const auto ff = isotonic_fit(f, wt);
        for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(ff[i], f[i], 1e-14);
    }
}

TEST(Optimizer, HighTemperatureValueIsAnnealed) {
    const auto rep = optimize_x(anchored_grid(kHot, 2), kHot);
    ASSERT_TRUE(rep.converged);
    EXPECT_NEAR(rep.value, 0.8731471806, 1e-5);
    for (double x : rep.pair.x) {
        if (x < 1.0) {
            EXPECT_LT(x, 1e-3);
        }
    }
    const auto label = classify_phase(rep, kHot);
    EXPECT_EQ(label.kind, PhaseKind::Annealed);
    for (const auto& [l, m] : label.conditional_moments) EXPECT_LT(m, 1e-6) << "ell " << l;
}

TEST(Optimizer, StartingPointDoesNotChangeHighTemperatureOptimum) {
    OptimizeOptions o;
    o.multistart = false;
    const auto xi = anchored_grid(kHot, 2);
    const auto a = optimize_x(xi, kHot, {}, InitKind::zero, o);
    const auto b = optimize_x(xi, kHot, {}, InitKind::linear, o);
    ASSERT_TRUE(a.converged && b.converged);
    EXPECT_NEAR(a.value, b.value, 1e-7);
}

TEST(Optimizer, SingleLevelMatchesOneDimensionalSearch) {
    double arg = 0.0;
    const double want = min_profile(kSingle, arg);
    const auto rep = optimize_x(anchored_grid(kSingle, 1), kSingle);
    ASSERT_TRUE(rep.converged);
    EXPECT_NEAR(rep.value, want, 1e-6);
    EXPECT_NEAR(rep.pair.x[1], arg, 1e-3);
    EXPECT_LT(rep.residual, 1e-6);
    // Frozen from the search above.
    EXPECT_NEAR(rep.value, 1.1837878013, 1e-6);
}

TEST(Optimizer, ReportIsStationaryAndBelowStartingValue) {
    const ModelParams p{{0.4, 0.7, 1.0}, {0.9, 1.3}, FieldLaw{{{-0.4, 0.5}, {0.4, 0.5}}}};
    const auto xi = anchored_grid(p, 2);
    const auto rep = optimize_x(xi, p);
    ASSERT_TRUE(rep.converged);
    EXPECT_LT(stationarity_residual(rep.pair, p), 1e-6);
    std::vector<double> x0(xi.size(), 0.0);
    x0.back() = 1.0;
    EXPECT_LE(rep.value, evaluate(make_pair(xi, x0, p), p) + 1e-12);
    EXPECT_TRUE(validate_pair(rep.pair, p).empty());
}

TEST(Optimizer, BelowAnnealedPastThreshold) {
    const ModelParams p{{0.5, 1.0}, {std::sqrt(0.6)}, {}};
    const auto rep = optimize_x(anchored_grid(p, 1), p);
    ASSERT_TRUE(rep.converged);
    EXPECT_LT(rep.value, std::numbers::ln2 + 0.3 - 1e-4);
}

TEST(Refinement, ValuesNonincreasingInK) {
    const auto rep = refine_k(kSingle, {}, {1, 2, 4});
    ASSERT_TRUE(rep.converged);
    ASSERT_GE(rep.refinement_history.size(), 2u);
    for (std::size_t i = 1; i < rep.refinement_history.size(); ++i)
        EXPECT_LE(rep.refinement_history[i].second, rep.refinement_history[i - 1].second + 1e-9);
    // Successive refinements settle.
    const auto& h = rep.refinement_history;
    EXPECT_LT(h.front().second - h.back().second, 5e-3);
}

TEST(Refinement, AnnealedStaysAnnealed) {
    const auto rep = refine_k(kHot, {}, {1, 2});
    ASSERT_TRUE(rep.converged);
    EXPECT_NEAR(rep.value, kHot.annealed_value(), 1e-6);
    EXPECT_EQ(classify_phase(rep, kHot).kind, PhaseKind::Annealed);
}

TEST(Plateau, TrivialMeasureHasZeroBound) {
    const ModelParams p{{0.2, 0.4, 1.0}, {0.9, 1.1}, {}};
    const auto c = plateau_bound_check(DiscreteMeasure::point_mass(0.0), p, 1);
    EXPECT_TRUE(c.applicable);
    EXPECT_NEAR(c.rhs, 0.0, 1e-15);
    EXPECT_TRUE(c.holds);
}

TEST(Plateau, BoundHoldsOnOptimizedMeasure) {
    const ModelParams p{{0.2, 0.4, 1.0}, {0.9, 1.1}, {}};
    const auto rep = refine_k(p, {}, {1, 2});
    ASSERT_TRUE(rep.converged);
    const auto c = plateau_bound_check(rep, p, 1);
    EXPECT_TRUE(c.applicable);
    EXPECT_TRUE(c.holds) << "delta " << c.delta << " rhs " << c.rhs;
}

TEST(Plateau, NotApplicableAtLowTemperature) {
    const ModelParams p{{0.3, 0.6, 1.0}, {1.0, 1.5}, {}};
    EXPECT_FALSE(plateau_bound_check(DiscreteMeasure::point_mass(0.0), p, 1).applicable);
}

TEST(Phase, RefusesUnconvergedReport) {
    OptimReport rep;
    rep.pair = make_pair({0.5, 1.0, 1.0}, {0.0, 0.2, 1.0}, kSingle);
    rep.converged = false;
    EXPECT_THROW(classify_phase(rep, kSingle), DomainError);
}

TEST(Curvature, ClosedFormMatchesDifferences) {
    for (double g2 : {0.3, 0.4, 0.5, 0.6, 1.0}) {
        const ModelParams p{{0.5, 1.0}, {std::sqrt(g2)}, {}};
        EXPECT_NEAR(annealed_curvature(p), rs_curvature_fd(p), 2e-3) << "gamma^2 " << g2;
    }
}
