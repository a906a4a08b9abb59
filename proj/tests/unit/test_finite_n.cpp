#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "msparisi/finite_n.hpp"
#include "msparisi/quadrature.hpp"

using namespace msparisi;

namespace {

const double kLn2 = std::numbers::ln2;

// Direct sum over all 2^N configurations, no Gray code.
double brute_log_partition(const ModelParams& p, const DisorderSample& s) {
    const int N = s.N;
    std::vector<double> expo;
    for (int m = 0; m < (1 << N); ++m) {
        std::vector<int> sig(static_cast<std::size_t>(N));
        for (int i = 0; i < N; ++i) sig[static_cast<std::size_t>(i)] = (m >> i) & 1 ? 1 : -1;
        double H = 0.0;
        for (int l = 1; l <= p.r(); ++l)
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    H += p.beta(l) * s.g[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(i * N + j)] *
                         sig[static_cast<std::size_t>(i)] * sig[static_cast<std::size_t>(j)] / std::sqrt(double(N));
        double hs = 0.0;
        for (int i = 0; i < N; ++i) hs += s.h[static_cast<std::size_t>(i)] * sig[static_cast<std::size_t>(i)];
        expo.push_back(-H - hs);
    }
    return log_sum_exp(expo);
}

SimOptions small(int N, int outer, int inner, std::uint64_t seed = 7) {
    SimOptions o;
    o.N = N;
    o.n_outer = outer;
    o.n_inner = {inner};
    o.seed = seed;
    return o;
}

}  // namespace

TEST(Disorder, ShapesAndDeterminism) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, FieldLaw{{{-0.3, 0.5}, {0.3, 0.5}}}};
    const auto a = draw_disorder(p, 5, 42), b = draw_disorder(p, 5, 42), c = draw_disorder(p, 5, 43);
    ASSERT_EQ(a.g.size(), 2u);
    EXPECT_EQ(a.g[0].size(), 25u);
    EXPECT_EQ(a.h.size(), 5u);
    EXPECT_EQ(a.g, b.g);
    EXPECT_EQ(a.h, b.h);
    EXPECT_NE(a.g, c.g);
    for (double h : a.h) EXPECT_TRUE(h == -0.3 || h == 0.3);
}

TEST(ExactPartition, ZeroCouplingsFactorize) {
    const ModelParams p{{0.5, 1.0}, {1.0}, FieldLaw{{{0.7, 1.0}}}};
    auto s = draw_disorder(p, 6, 1);
    for (auto& v : s.g[0]) v = 0.0;
    EXPECT_NEAR(exact_log_partition(p, s), 6.0 * log2cosh(0.7), 1e-12);
}

TEST(ExactPartition, SingleSpinByHand) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.5, 0.9}, FieldLaw{{{0.4, 1.0}}}};
    const auto s = draw_disorder(p, 1, 3);
    const double B = p.beta(1) * s.g[0][0] + p.beta(2) * s.g[1][0];
    EXPECT_NEAR(exact_log_partition(p, s), -B + log2cosh(0.4), 1e-12);
}

TEST(ExactPartition, MatchesDirectEnumeration) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.7, 1.2}, FieldLaw{{{-0.5, 0.4}, {0.2, 0.6}}}};
    for (int N : {2, 3, 5, 8}) {
        const auto s = draw_disorder(p, N, 100 + static_cast<std::uint64_t>(N));
        EXPECT_NEAR(exact_log_partition(p, s), brute_log_partition(p, s), 1e-10) << "N " << N;
    }
    EXPECT_THROW(exact_log_partition(p, draw_disorder(p, 21, 1)), DomainError);
}

TEST(ExactPartition, DisorderAverageOfZMatchesAnnealedFormula) {
    // Checks the sign and scaling of the couplings: E_g Z = sum_sigma e^{-h.sigma} e^{N gamma_r^2 / 2}.
    const ModelParams p{{0.5, 1.0}, {0.5}, FieldLaw{{{0.3, 1.0}}}};
    const int N = 3, M = 40000;
    std::vector<double> logs;
    for (int m = 0; m < M; ++m) logs.push_back(exact_log_partition(p, draw_disorder(p, N, 5000 + static_cast<std::uint64_t>(m))));
    const double mc = (log_sum_exp(logs) - std::log(double(M))) / N;
    const double want = annealed_log_partition_per_spin(p, draw_disorder(p, N, 1));
    EXPECT_NEAR(want, log2cosh(0.3) + 0.125, 1e-12);
    EXPECT_NEAR(mc, want, 0.01);
}

TEST(SingleSpin, ClosedForm) {
    const ModelParams p{{0.5, 1.0}, {1.0}, {}};
    EXPECT_NEAR(single_spin_pressure(p), 0.9431471806, 1e-10);
    const ModelParams q{{0.2, 0.5, 1.0}, {0.6, 1.0}, FieldLaw{{{0.5, 0.5}, {-0.5, 0.5}}}};
    EXPECT_NEAR(single_spin_pressure(q), log2cosh(0.5) + 0.2 * 0.36 / 2 + 0.5 * 0.64 / 2, 1e-12);
}

TEST(NestedPressure, SingleSpinAgreesWithClosedForm) {
    const ModelParams p{{0.5, 1.0}, {1.0}, {}};
    const auto e = nested_pressure(p, small(1, 4000, 300));
    EXPECT_NEAR(e.mean, single_spin_pressure(p), 4.0 * e.std_error);
    EXPECT_GT(e.std_error, 0.0);
}

TEST(NestedPressure, TwoLevelSingleSpinAgreesWithClosedForm) {
    const ModelParams p{{0.3, 0.6, 1.0}, {0.6, 1.0}, {}};
    SimOptions o = small(1, 1500, 100);
    o.n_inner = {60, 60};
    const auto e = nested_pressure(p, o);
    EXPECT_NEAR(e.mean, single_spin_pressure(p), 4.0 * e.std_error + 2e-3);
}

TEST(NestedPressure, DeterministicAndThreadIndependent) {
    const ModelParams p{{0.5, 1.0}, {0.8}, {}};
    const auto o = small(4, 40, 30, 99);
    setenv("MSPARISI_THREADS", "1", 1);
    const auto a = nested_pressure(p, o);
    setenv("MSPARISI_THREADS", "3", 1);
    const auto b = nested_pressure(p, o);
    const auto c = nested_pressure(p, o);
    unsetenv("MSPARISI_THREADS");
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_EQ(b.mean, c.mean);
    EXPECT_EQ(a.seed, 99u);
    auto o2 = o;
    o2.seed = 100;
    EXPECT_NE(nested_pressure(p, o2).mean, a.mean);
}

TEST(NestedPressure, ZeroCouplingIsFreeSpin) {
    const ModelParams p{{0.5, 1.0}, {1.0}, FieldLaw{{{0.6, 1.0}}}};
    SimOptions o = small(5, 10, 5);
    o.coupling_scale = 0.0;
    const auto e = nested_pressure(p, o);
    EXPECT_NEAR(e.mean, log2cosh(0.6), 1e-12);
}

TEST(NestedPressure, BelowAnnealedBound) {
    const ModelParams p{{0.5, 1.0}, {0.4}, {}};
    const auto e = nested_pressure(p, small(8, 150, 150));
    EXPECT_LE(e.mean, kLn2 + 0.08 + 3.0 * e.std_error);
    EXPECT_NEAR(e.mean, kLn2 + 0.08, 0.05);
}

TEST(NestedPressure, RefusesOutOfRangeRequests) {
    const ModelParams p{{0.5, 1.0}, {1.0}, {}};
    EXPECT_THROW(nested_pressure(p, small(15, 10, 10)), DomainError);
    EXPECT_THROW(nested_pressure(p, small(4, 1, 10)), DomainError);
    auto o = small(4, 10, 10);
    o.n_inner = {};
    EXPECT_THROW(nested_pressure(p, o), DomainError);
    const ModelParams deep{{0.2, 0.4, 0.6, 1.0}, {0.3, 0.5, 0.7}, {}};
    EXPECT_THROW(nested_pressure(deep, small(2, 4, 3)), DomainError);
    auto d = small(2, 4, 3);
    d.allow_deep = true;
    EXPECT_NO_THROW(nested_pressure(deep, d));
}

TEST(OverlapMoment, FreeSpinsGiveOneOverN) {
    const ModelParams p{{0.5, 1.0}, {1.0}, {}};
    SimOptions o = small(6, 10, 5);
    o.coupling_scale = 0.0;
    for (int ell : {0, 1}) EXPECT_NEAR(overlap_moment_sim(p, ell, o).mean, 1.0 / 6.0, 1e-12);
    EXPECT_THROW(overlap_moment_sim(p, 2, o), DomainError);
}

TEST(OverlapMoment, NondecreasingInLevel) {
    const ModelParams p{{0.5, 1.0}, {1.0}, {}};
    const auto o = small(6, 150, 60, 11);
    const auto a = overlap_moment_sim(p, 0, o), b = overlap_moment_sim(p, 1, o);
    EXPECT_LE(a.mean, b.mean + 3.0 * std::hypot(a.std_error, b.std_error));
    EXPECT_GE(a.mean, 1.0 / 6.0 - 1e-12);
    EXPECT_LE(b.mean, 1.0 + 1e-12);
}
