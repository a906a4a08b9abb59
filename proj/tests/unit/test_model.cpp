#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "msparisi/model.hpp"

using namespace msparisi;

namespace {

bool mentions(const ValidationReport& r, const std::string& needle) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

// Direct evaluation of sum_ell (zeta_ell - zeta_{ell-1}) (1 - 2 g^2) g^2 with gamma_0 = 0.
double lowtemp_oracle(const std::vector<double>& zeta, const std::vector<double>& gamma) {
    double s = 0.0;
    for (std::size_t l = 1; l < zeta.size(); ++l) {
        const double g2 = gamma[l - 1] * gamma[l - 1];
        s += (zeta[l] - zeta[l - 1]) * (1.0 - 2.0 * g2) * g2;
    }
    return s;
}

}  // namespace

TEST(ValidateModel, AcceptsSingleLevelModel) {
    EXPECT_TRUE(validate_model(ModelParams{{0.5, 1.0}, {1.0}, {}}).ok());
}

TEST(ValidateModel, RejectsUnorderedZeta) {
    const auto r = validate_model(ModelParams{{0.6, 0.3, 1.0}, {0.5, 0.7}, {}});
    EXPECT_TRUE(mentions(r, "zeta not strictly increasing"));
}

TEST(ValidateModel, RejectsFlatGamma) {
    const auto r = validate_model(ModelParams{{0.3, 0.6, 1.0}, {0.5, 0.5}, {}});
    EXPECT_TRUE(mentions(r, "gamma not strictly increasing"));
}

TEST(ValidateModel, ListsEveryViolation) {
    ModelParams p{{0.6, 0.3, 0.9}, {0.5, 0.5}, FieldLaw{{{0.0, 0.5}}}};
    EXPECT_GE(validate_model(p).violations.size(), 3u);
    EXPECT_THROW(require_valid(p), DomainError);
}

TEST(ValidateModel, RejectsZetaNotEndingAtOne) {
    EXPECT_FALSE(validate_model(ModelParams{{0.3, 0.9}, {0.5}, {}}).ok());
}

TEST(ValidateModel, RejectsNonpositiveZetaZero) {
    EXPECT_FALSE(validate_model(ModelParams{{0.0, 1.0}, {0.5}, {}}).ok());
}

TEST(LowtempLhs, LowTemperatureExample) {
    const ModelParams p{{0.3, 0.6, 1.0}, {1.0, 1.5}, {}};
    EXPECT_NEAR(lowtemp_oracle(p.zeta, p.gamma), -3.45, 1e-12);
    EXPECT_NEAR(lowtemp_lhs(p), -3.45, 1e-12);
}

TEST(LowtempLhs, PlateauExample) {
    const ModelParams p{{0.2, 0.4, 1.0}, {0.9, 1.1}, {}};
    EXPECT_NEAR(lowtemp_lhs(p), lowtemp_oracle(p.zeta, p.gamma), 1e-14);
    EXPECT_NEAR(lowtemp_lhs(p), -1.13136, 1e-10);
}

TEST(LowtempLhs, VanishesAtCriticalCoupling) {
    // Strictly increasing gamma cannot all equal 1/sqrt 2, so use a single level.
    EXPECT_NEAR(lowtemp_lhs(ModelParams{{0.4, 1.0}, {std::sqrt(0.5)}, {}}), 0.0, 1e-15);
}

TEST(LowtempLhs, AdditiveOverSplitIncrements) {
    // Splitting (zeta_0, zeta_1] at 0.45 with the same gamma on both halves.
    const double g = 1.2;
    const ModelParams coarse{{0.3, 0.6, 1.0}, {0.8, g}, {}};
    const double split = lowtemp_oracle({0.3, 0.45, 0.6, 1.0}, {0.8, 0.8, g});
    EXPECT_NEAR(lowtemp_lhs(coarse), split, 1e-14);
}

TEST(LowtempLhs, NonnegativeWhenAllCouplingsSubcritical) {
    for (double g : {0.1, 0.3, 0.5, 0.7})
        EXPECT_GE(lowtemp_lhs(ModelParams{{0.2, 0.5, 1.0}, {g * 0.5, g}, {}}), 0.0);
}

TEST(AnnealedRegion, SubcriticalZeroField) { EXPECT_TRUE(annealed_region(ModelParams{{0.5, 1.0}, {0.6}, {}})); }

TEST(AnnealedRegion, SupercriticalCoupling) { EXPECT_FALSE(annealed_region(ModelParams{{0.5, 1.0}, {0.8}, {}})); }

TEST(AnnealedRegion, NonzeroField) {
    EXPECT_FALSE(annealed_region(ModelParams{{0.5, 1.0}, {0.3}, FieldLaw::point_mass(1.0)}));
}

TEST(AnnealedRegion, ImpliesNonnegativeLowtempSum) {
    const ModelParams p{{0.25, 0.5, 1.0}, {0.4, 0.7}, {}};
    ASSERT_TRUE(annealed_region(p));
    EXPECT_GE(lowtemp_lhs(p), 0.0);
}

TEST(ModelParams, BetaIncrements) {
    const ModelParams p{{0.3, 0.6, 1.0}, {1.0, 1.5}, {}};
    EXPECT_NEAR(p.beta(1), 1.0, 1e-15);
    EXPECT_NEAR(p.beta(2), std::sqrt(1.25), 1e-15);
}
