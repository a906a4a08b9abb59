#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "msparisi/checks.hpp"
#include "msparisi/measures.hpp"

using namespace msparisi;

namespace {

const DiscreteMeasure kTwoAtoms = DiscreteMeasure::from_atoms({{0.0, 0.4}, {0.5, 0.6}});
const DiscreteMeasure kExample = DiscreteMeasure::from_atoms({{0.2, 0.3}, {0.6, 0.7}});
const ModelParams kR1{{0.5, 1.0}, {1.0}, {}};

// Midpoint rule for int_a^b f(mu^{-1}(p)) dp.
template <class F>
double quantile_integral(const DiscreteMeasure& mu, double a, double b, F f, int n = 200000) {
    double s = 0.0;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) s += f(quantile(mu, a + (i + 0.5) * h));
    return s * h;
}

double w1_riemann(const DiscreteMeasure& a, const DiscreteMeasure& b, int n = 200000) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = (i + 0.5) / n;
        s += std::abs(quantile(a, p) - quantile(b, p));
    }
    return s / n;
}

}  // namespace

TEST(Quantile, AttainsInfimumAtAtom) { EXPECT_EQ(quantile(kTwoAtoms, 0.4), 0.0); }

TEST(Quantile, JumpsPastAtom) { EXPECT_EQ(quantile(kTwoAtoms, 0.41), 0.5); }

TEST(Quantile, PointMass) {
    const auto mu = DiscreteMeasure::point_mass(0.3);
    for (double p : {1e-9, 0.2, 0.7, 1.0}) EXPECT_EQ(quantile(mu, p), 0.3);
}

TEST(Quantile, RejectsOutOfRange) {
    EXPECT_THROW(quantile(kTwoAtoms, -0.1), DomainError);
    EXPECT_THROW(quantile(kTwoAtoms, 1.1), DomainError);
}

TEST(Quantile, GaloisConnectionOnRandomMeasures) {
    CheckRng rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const auto mu = random_measure(rng, 6);
        const double p = u(rng);
        EXPECT_GE(mu.cdf_at(quantile(mu, p)), p - 1e-15);
        for (double s : mu.atoms()) EXPECT_LE(quantile(mu, mu.cdf_at(s)), s);
    }
}

TEST(Quantile, NondecreasingInP) {
    CheckRng rng(12);
    const auto mu = random_measure(rng, 6);
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
        const double q = quantile(mu, i / 1000.0);
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(Wasserstein, IdentityIsZero) { EXPECT_EQ(wasserstein1(kExample, kExample), 0.0); }

TEST(Wasserstein, PointMasses) {
    EXPECT_NEAR(wasserstein1(DiscreteMeasure::point_mass(0.0), DiscreteMeasure::point_mass(0.5)), 0.5, 1e-15);
}

TEST(Wasserstein, TwoAtomsAgainstPointMass) {
    const double oracle = w1_riemann(kTwoAtoms, DiscreteMeasure::point_mass(0.0));
    EXPECT_NEAR(oracle, 0.3, 1e-5);
    EXPECT_NEAR(wasserstein1(kTwoAtoms, DiscreteMeasure::point_mass(0.0)), 0.3, 1e-15);
}

TEST(Wasserstein, MatchesRiemannSumOnRandomPairs) {
    CheckRng rng(13);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_measure(rng, 5), b = random_measure(rng, 5);
        EXPECT_NEAR(wasserstein1(a, b), w1_riemann(a, b), 2e-5);
    }
}

TEST(Wasserstein, MetricAxiomsOnRandomTriples) {
    CheckRng rng(14);
    for (int t = 0; t < 300; ++t) {
        const auto a = random_measure(rng, 5), b = random_measure(rng, 5), c = random_measure(rng, 5);
        EXPECT_NEAR(wasserstein1(a, b), wasserstein1(b, a), 1e-15);
        EXPECT_LE(wasserstein1(a, c), wasserstein1(a, b) + wasserstein1(b, c) + 1e-14);
        EXPECT_GE(wasserstein1(a, b), 0.0);
    }
}

TEST(MeasureToPair, SingleLevelExample) {
    const auto pair = measure_to_pair(kExample, kR1);
    const std::vector<double> xi{0.3, 0.5, 1.0, 1.0};
    ASSERT_EQ(pair.xi.size(), xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) EXPECT_NEAR(pair.xi[j], xi[j], 1e-15);
    // Independent: x_j is the quantile at xi_j, trailing 1.
    for (std::size_t j = 0; j + 1 < xi.size(); ++j) EXPECT_EQ(pair.x[j], quantile(kExample, xi[j]));
    const std::vector<double> x{0.2, 0.6, 0.6, 1.0};
    for (std::size_t j = 0; j < x.size(); ++j) EXPECT_EQ(pair.x[j], x[j]);
}

TEST(MeasureToPair, NoRepetitionsWhenCdfContainsZeta) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    const auto mu = DiscreteMeasure::from_atoms({{0.1, 0.3}, {0.4, 0.3}, {0.7, 0.4}});
    const auto pair = measure_to_pair(mu, p);
    for (int j = 1; j <= pair.k(); ++j)
        EXPECT_LT(pair.x[static_cast<std::size_t>(j - 1)], pair.x[static_cast<std::size_t>(j)]);
}

TEST(MeasureToPair, PointMassAtZero) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    const auto pair = measure_to_pair(DiscreteMeasure(), p);
    for (int j = 0; j <= pair.k(); ++j) EXPECT_EQ(pair.x[static_cast<std::size_t>(j)], 0.0);
    EXPECT_EQ(pair.x.back(), 1.0);
}

TEST(PairToMeasure, MergesEqualValues) {
    const auto mu = pair_to_measure(make_pair({0.3, 0.5, 1.0, 1.0}, {0.2, 0.6, 0.6, 1.0}, kR1));
    ASSERT_EQ(mu.size(), 2u);
    EXPECT_EQ(mu.atoms()[0], 0.2);
    EXPECT_NEAR(mu.weight(0), 0.3, 1e-15);
    EXPECT_EQ(mu.atoms()[1], 0.6);
    EXPECT_NEAR(mu.weight(1), 0.7, 1e-15);
}

TEST(PairToMeasure, AllZero) {
    const auto mu = pair_to_measure(make_pair({0.5, 1.0, 1.0}, {0.0, 0.0, 1.0}, kR1));
    ASSERT_EQ(mu.size(), 1u);
    EXPECT_EQ(mu.atoms()[0], 0.0);
}

TEST(PairToMeasure, StrictlyIncreasingX) {
    const auto mu = pair_to_measure(make_pair({0.2, 0.5, 0.7, 1.0, 1.0}, {0.1, 0.2, 0.4, 0.8, 1.0}, kR1));
    const std::vector<double> w{0.2, 0.3, 0.2, 0.3};
    ASSERT_EQ(mu.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(mu.weight(i), w[i], 1e-15);
}

TEST(RoundTrip, MeasureThroughPairOnRandomMeasures) {
    CheckRng rng(15);
    const ModelParams p{{0.25, 0.5, 1.0}, {0.6, 1.1}, {}};
    for (int t = 0; t < 200; ++t) {
        const auto mu = random_measure(rng, 5);
        const auto back = pair_to_measure(measure_to_pair(mu, p));
        ASSERT_EQ(back.size(), mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) {
            EXPECT_NEAR(back.atoms()[i], mu.atoms()[i], 1e-12);
            EXPECT_NEAR(back.cdf()[i], mu.cdf()[i], 1e-12);
        }
    }
}

TEST(RoundTrip, MinimalPairThroughMeasure) {
    const ParisiPair pair = make_pair({0.3, 0.5, 1.0, 1.0}, {0.2, 0.6, 0.6, 1.0}, kR1);
    const auto again = measure_to_pair(pair_to_measure(pair), kR1);
    ASSERT_EQ(again.xi.size(), pair.xi.size());
    for (std::size_t j = 0; j < pair.xi.size(); ++j) {
        EXPECT_NEAR(again.xi[j], pair.xi[j], 1e-12);
        EXPECT_NEAR(again.x[j], pair.x[j], 1e-12);
    }
}

TEST(ConditionalMoment, SingleLevelExample) {
    const double oracle = quantile_integral(kExample, 0.5, 1.0, [](double x) { return x * x; }) / 0.5;
    EXPECT_NEAR(oracle, 0.36, 1e-9);
    EXPECT_NEAR(conditional_moment(kExample, kR1, 1, 2), 0.36, 1e-14);
}

TEST(ConditionalMoment, PointMassAtZero) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    for (int l = 1; l <= 2; ++l) EXPECT_EQ(conditional_moment(DiscreteMeasure(), p, l, 2), 0.0);
}

TEST(ConditionalMoment, PowerZeroNormalizes) {
    CheckRng rng(16);
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    for (int t = 0; t < 50; ++t) {
        const auto mu = random_measure(rng, 5);
        for (int l = 1; l <= 2; ++l) EXPECT_NEAR(conditional_moment(mu, p, l, 0), 1.0, 1e-12);
    }
}

TEST(ConditionalMoment, MatchesQuantileIntegral) {
    CheckRng rng(17);
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    for (int t = 0; t < 5; ++t) {
        const auto mu = random_measure(rng, 5);
        for (int l = 1; l <= 2; ++l) {
            const double lo = p.zeta_at(l - 1), hi = p.zeta_at(l);
            const double oracle = quantile_integral(mu, lo, hi, [](double x) { return x * x; }) / (hi - lo);
            EXPECT_NEAR(conditional_moment(mu, p, l, 2), oracle, 1e-5);
        }
    }
}

TEST(ConditionalMoment, NondecreasingInLevel) {
    CheckRng rng(18);
    const ModelParams p{{0.2, 0.45, 0.7, 1.0}, {0.5, 0.9, 1.3}, {}};
    for (int t = 0; t < 300; ++t) {
        const auto mu = random_measure(rng, 6);
        for (int l = 1; l < 3; ++l)
            EXPECT_LE(conditional_moment(mu, p, l, 2), conditional_moment(mu, p, l + 1, 2) + 1e-14);
    }
}

TEST(GapDelta, JumpExactlyAtHeight) {
    const auto mu = DiscreteMeasure::from_atoms({{0.2, 0.5}, {0.8, 0.5}});
    EXPECT_NEAR(gap_delta(mu, kR1, 0), 0.6, 1e-15);
}

TEST(GapDelta, NoJumpInsideAtom) { EXPECT_EQ(gap_delta(kExample, kR1, 0), 0.0); }

TEST(GapDelta, PointMassAtZero) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    for (int l = 0; l <= 1; ++l) EXPECT_EQ(gap_delta(DiscreteMeasure(), p, l), 0.0);
}

TEST(GapDelta, NonnegativeOnRandomMeasures) {
    CheckRng rng(19);
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    for (int t = 0; t < 200; ++t) {
        const auto mu = random_measure(rng, 6);
        for (int l = 0; l <= 1; ++l) EXPECT_GE(gap_delta(mu, p, l), 0.0);
    }
}

TEST(SyncCoupling, PointMassAtZero) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, {}};
    const auto c = sync_coupling(DiscreteMeasure(), p);
    ASSERT_EQ(c.pairs.size(), 3u);
    const std::vector<double> probs{0.3, 0.3, 0.4};
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(c.pairs[i].x, 0.0);
        EXPECT_EQ(c.pairs[i].gamma, p.gamma_at(static_cast<int>(i)));
        EXPECT_NEAR(c.pairs[i].prob, probs[i], 1e-15);
    }
}

TEST(SyncCoupling, SingleLevelExample) {
    const auto c = sync_coupling(kExample, kR1);
    ASSERT_EQ(c.pairs.size(), 3u);
    EXPECT_EQ(c.pairs[0].x, 0.2);
    EXPECT_EQ(c.pairs[0].gamma, 0.0);
    EXPECT_NEAR(c.pairs[0].prob, 0.3, 1e-15);
    EXPECT_EQ(c.pairs[1].x, 0.6);
    EXPECT_EQ(c.pairs[1].gamma, 0.0);
    EXPECT_NEAR(c.pairs[1].prob, 0.2, 1e-15);
    EXPECT_EQ(c.pairs[2].x, 0.6);
    EXPECT_EQ(c.pairs[2].gamma, 1.0);
    EXPECT_NEAR(c.pairs[2].prob, 0.5, 1e-15);
}

TEST(SyncCoupling, ExactMarginalsAndComonotone) {
    CheckRng rng(20);
    const ModelParams p{{0.2, 0.45, 0.7, 1.0}, {0.5, 0.9, 1.3}, {}};
    for (int t = 0; t < 200; ++t) {
        const auto mu = random_measure(rng, 6);
        const auto c = sync_coupling(mu, p);
        std::map<double, double> by_x, by_g;
        for (const auto& a : c.pairs) {
            by_x[a.x] += a.prob;
            by_g[a.gamma] += a.prob;
        }
        ASSERT_EQ(by_x.size(), mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_NEAR(by_x[mu.atoms()[i]], mu.weight(i), 1e-12);
        for (int l = 0; l <= p.r(); ++l) EXPECT_NEAR(by_g[p.gamma_at(l)], p.zeta_at(l) - p.zeta_at(l - 1), 1e-12);
        for (std::size_t i = 1; i < c.pairs.size(); ++i) {
            EXPECT_LE(c.pairs[i - 1].x, c.pairs[i].x);
            EXPECT_LE(c.pairs[i - 1].gamma, c.pairs[i].gamma);
        }
    }
}
