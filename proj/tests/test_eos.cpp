#include <gtest/gtest.h>

#include "kapila/eos.hpp"
#include "test_support.hpp"

using namespace kapila;
using kapila::testing::rel_diff;

TEST(Eos, ConservedPrimitiveRoundTrip) {
  const auto eos = kapila::testing::water_air();
  std::mt19937_64 rng(20240611);
  for (int n = 0; n < 1000; ++n) {
    const PrimitiveState w = kapila::testing::random_state(rng);
    const PrimitiveState back = conserved_to_primitive(primitive_to_conserved(w, eos), eos);
    EXPECT_LT(rel_diff(back.rho, w.rho), 1e-14);
    EXPECT_LT(rel_diff(back.zeta1, w.zeta1), 1e-14);
    EXPECT_LT(std::abs(back.u - w.u), 1e-12 * std::max(1.0, std::abs(w.u)));
    EXPECT_LT(std::abs(back.v - w.v), 1e-12 * std::max(1.0, std::abs(w.v)));
    // p is recovered from rho e, which carries the pi-term of the liquid.
    EXPECT_LT(std::abs(back.p - w.p), 1e-12 * (w.p + eos.phase1.pi));
    EXPECT_EQ(back.alpha1, w.alpha1);
  }
}

TEST(Eos, PressureRelationInvertsEnergy) {
  const auto eos = kapila::testing::water_air();
  for (double a : {0.0, 1e-6, 0.3, 0.999, 1.0})
    for (double p : {1e3, 1e5, 1e9}) {
      const double back = mixture_pressure(mixture_rho_e(p, a, eos), a, eos);
      EXPECT_LT(std::abs(back - p), 1e-12 * (p + eos.phase1.pi)) << a << " " << p;
    }
}

TEST(Eos, WoodSpeedReducesToPurePhases) {
  const auto eos = kapila::testing::water_air();
  PrimitiveState w{1.0, 1000.0, 0.0, 0.0, 1e5, 1.0};
  EXPECT_NEAR(wood_sound_speed(w, eos), std::sqrt(4.4 * (1e5 + 6e8) / 1000.0), 1e-9);
  w = {0.0, 1.2, 0.0, 0.0, 1e5, 0.0};
  EXPECT_NEAR(wood_sound_speed(w, eos), std::sqrt(1.4e5 / 1.2), 1e-12);
}

TEST(Eos, WoodSpeedBelowBothPhaseSpeedsInBubblyMixture) {
  const auto eos = kapila::testing::water_air();
  PrimitiveState w{0.0, 0.0, 0.0, 0.0, 1e5, 0.5};
  w.rho = 0.5 * 1000.0 + 0.5 * 1.0;
  w.zeta1 = 500.0 / w.rho;
  const double c = wood_sound_speed(w, eos);
  EXPECT_LT(c, std::sqrt(1.4e5 / 1.0));
  EXPECT_GT(c, 0.0);
}

TEST(Eos, SourceCoefficientMatchesDefinition) {
  const auto eos = kapila::testing::water_air();
  const double p = 2e5, a = 0.3;
  const double z1 = 4.4 * (p + 6e8), z2 = 1.4 * p;
  EXPECT_LT(rel_diff(source_coefficient(p, a, eos), z2 / (a * z2 + (1 - a) * z1)), 1e-14);
  // Identical phases: K = 1.
  const TwoPhaseEos same{{1.4, 0.0}, {1.4, 0.0}};
  EXPECT_DOUBLE_EQ(source_coefficient(1e5, 0.42, same), 1.0);
}

TEST(Eos, CheckStateRejectsBadStates) {
  const auto eos = kapila::testing::water_air();
  PrimitiveState w{0.5, 10.0, 0.0, 0.0, 1e5, 0.5};
  EXPECT_NO_THROW(check_state(w, eos));
  auto bad = w;
  bad.rho = -1.0;
  EXPECT_THROW(check_state(bad, eos), InvalidStateError);
  bad = w;
  bad.alpha1 = 1.5;
  EXPECT_THROW(check_state(bad, eos), InvalidStateError);
  bad = w;
  bad.p = -1.0;  // air present, p + pi2 < 0
  EXPECT_THROW(check_state(bad, eos), InvalidStateError);
}

TEST(Eos, ValidateRejectsBadGamma) {
  EXPECT_THROW((StiffenedGas{1.0, 0.0}.validate()), ConfigError);
  EXPECT_THROW((StiffenedGas{1.4, -1.0}.validate()), ConfigError);
  EXPECT_NO_THROW((StiffenedGas{4.4, 6e8}.validate()));
}
