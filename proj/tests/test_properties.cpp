// Randomized invariants. Each test draws from its own fixed seed so a
// failure reproduces exactly.

#include <gtest/gtest.h>

#include <cmath>

#include "oracle.hpp"
#include "raceworlds/equilibrium.hpp"
#include "raceworlds/thresholds.hpp"

namespace rw = raceworlds;
using rw::Role;
using rw::Strategy;
using rw::ThresholdKind;
using rw::World;

namespace {

constexpr int kDraws = 5000;

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

TEST(Property, WinProbabilitiesSumToOne) {
  rw::oracle::Generator gen(101);
  for (int n = 0; n < kDraws; ++n) {
    const auto p = gen.params();
    for (auto prof : rw::kAllProfiles) {
      const double sum = rw::win_probability(Role::Frontrunner, prof.frontrunner, prof.laggard, p) +
                         rw::win_probability(Role::Laggard, prof.laggard, prof.frontrunner, p);
      ASSERT_NEAR(sum, 1.0, 1e-12) << n;
    }
  }
}

TEST(Property, LogisticMonotone) {
  rw::oracle::Generator gen(102);
  for (int n = 0; n < kDraws; ++n) {
    const double a = gen.uniform(-50, 50);
    const double b = a + gen.uniform(0, 5);
    ASSERT_LE(rw::logistic(a), rw::logistic(b));
    const double sigma = gen.uniform(0.02, 0.5);
    ASSERT_LE(rw::p_win(std::fabs(a) / 20, sigma), rw::p_win(std::fabs(a) / 20 + 0.01, sigma));
  }
}

TEST(Property, BoostOrdering) {
  rw::oracle::Generator gen(103);
  for (int n = 0; n < kDraws; ++n) {
    const double base = gen.uniform(1e-6, 1 - 1e-6);
    const double boost = gen.uniform(0, 20);
    const double up = rw::shifted_win_prob(base, boost, rw::ShiftDirection::RacingVsPauser);
    const double down = rw::shifted_win_prob(base, boost, rw::ShiftDirection::PausingVsRacer);
    ASSERT_LE(down, base);
    ASSERT_LE(base, up);
    // The shift is symmetric in log-odds, so the two boosted chances of
    // opposite players add to one.
    ASSERT_NEAR(up + rw::shifted_win_prob(1 - base, boost, rw::ShiftDirection::PausingVsRacer),
                1.0, 1e-12);
  }
}

TEST(Property, UtilityBounds) {
  rw::oracle::Generator gen(104);
  for (int n = 0; n < kDraws; ++n) {
    const auto p = gen.params();
    for (auto prof : rw::kAllProfiles) {
      for (Role role : {Role::Frontrunner, Role::Laggard}) {
        const Strategy own = role == Role::Frontrunner ? prof.frontrunner : prof.laggard;
        const Strategy rival = role == Role::Frontrunner ? prof.laggard : prof.frontrunner;
        const double eu = rw::expected_utility(role, own, rival, p);
        ASSERT_LE(eu, 1.0 + 1e-12);
        ASSERT_GE(eu, -p.cost - 1e-12);
        if (own == Strategy::Pause && rival == Strategy::Pause) {
          // Nobody races, so there is no catastrophe term.
          ASSERT_GE(eu, 1.0 - p.winner_advantage - 1e-12);
        }
        ASSERT_EQ(eu, rw::expected_utility(role, own, rival, p));
      }
    }
  }
}

TEST(Property, ThresholdOrdering) {
  rw::oracle::Generator gen(105);
  for (int n = 0; n < kDraws; ++n) {
    const auto p = gen.params();
    const double fc = rw::threshold(ThresholdKind::FrontrunnerCooperation, p);
    const double fub = rw::threshold(ThresholdKind::FrontrunnerUnilateralBreak, p);
    const double lc = rw::threshold(ThresholdKind::LaggardCooperation, p);
    const double lub = rw::threshold(ThresholdKind::LaggardUnilateralBreak, p);
    ASSERT_LE(fc, lc);
    ASSERT_LE(fub, lub);
    // UB + 1 = s e^B (Coop + 1) for both roles.
    const double se = p.s_race * std::exp((1 - p.s_race) / p.sigma);
    auto offset = [&](ThresholdKind k) {
      return rw::threshold_offset(k, p.delta, p.winner_advantage, p.sigma, p.s_race);
    };
    if (std::isfinite(se) && se < 1e12) {
      ASSERT_LE(rel(offset(ThresholdKind::FrontrunnerUnilateralBreak),
                    se * offset(ThresholdKind::FrontrunnerCooperation)),
                1e-12);
      ASSERT_LE(rel(offset(ThresholdKind::LaggardUnilateralBreak),
                    se * offset(ThresholdKind::LaggardCooperation)),
                1e-12);
    }
    if (se >= 1.0) {
      ASSERT_LE(fc, fub);
      ASSERT_LE(lc, lub);
    } else {
      ASSERT_GE(fc, fub);
      ASSERT_LT(lc, 0.0);
    }
  }
}

TEST(Property, MirrorSymmetry) {
  rw::oracle::Generator gen(106);
  for (int n = 0; n < kDraws; ++n) {
    const auto p = gen.params();
    auto at = [&](ThresholdKind k, double d) {
      return rw::threshold(k, d, p.winner_advantage, p.sigma, p.s_race);
    };
    ASSERT_EQ(at(ThresholdKind::FrontrunnerCooperation, -p.delta),
              at(ThresholdKind::LaggardCooperation, p.delta));
    ASSERT_EQ(at(ThresholdKind::FrontrunnerUnilateralBreak, -p.delta),
              at(ThresholdKind::LaggardUnilateralBreak, p.delta));
  }
}

TEST(Property, ThresholdScalesLinearlyWithW) {
  rw::oracle::Generator gen(107);
  for (int n = 0; n < kDraws; ++n) {
    const auto p = gen.params();
    const double w = gen.uniform(0.01, 1.0);
    for (auto k : rw::kAllThresholdKinds) {
      const double one = rw::threshold_offset(k, p.delta, 1.0, p.sigma, p.s_race);
      const double scaled = rw::threshold_offset(k, p.delta, w, p.sigma, p.s_race);
      ASSERT_EQ(rw::threshold(k, p.delta, w, p.sigma, p.s_race), scaled - 1.0);
      if (!std::isfinite(one) || one == 0.0) continue;
      ASSERT_LE(std::fabs(scaled - w * one) / (w * one), 1e-12) << rw::short_name(k) << " " << n;
    }
  }
}

TEST(Property, ParityThresholdsCoincide) {
  rw::oracle::Generator gen(108);
  for (int n = 0; n < kDraws; ++n) {
    auto p = gen.params();
    p.delta = 0.0;
    ASSERT_EQ(rw::threshold(ThresholdKind::FrontrunnerCooperation, p),
              rw::threshold(ThresholdKind::LaggardCooperation, p));
    ASSERT_EQ(rw::threshold(ThresholdKind::FrontrunnerUnilateralBreak, p),
              rw::threshold(ThresholdKind::LaggardUnilateralBreak, p));
  }
}

TEST(Property, ClassificationMatchesBruteForce) {
  rw::oracle::Generator gen(109);
  int compared = 0;
  for (int n = 0; n < kDraws; ++n) {
    const auto p = gen.params();
    const auto ref = rw::oracle::brute_force_nash(p);
    if (ref.min_abs_difference <= 1e-9L) continue;
    ++compared;
    const auto ne = rw::equilibria_from(rw::best_responses_by_threshold(p));
    for (std::size_t k = 0; k < 4; ++k) {
      ASSERT_EQ(ne.contains(rw::kAllProfiles[k]), ref.is_equilibrium[k]) << n;
    }
  }
  EXPECT_GT(compared, kDraws * 3 / 4);
}

TEST(Property, OnlyPrincipalWorldsOccur) {
  rw::oracle::Generator gen(110);
  for (int n = 0; n < 4 * kDraws; ++n) {
    const auto p = gen.params(5.0, 100.0);
    const World w = rw::classify_world(p);
    ASSERT_TRUE(rw::is_principal(w)) << rw::to_string(w) << " at n=" << n;
  }
}

TEST(Property, CostColumnsAreMonotone) {
  // Raising C never turns a pause best response into a race.
  rw::oracle::Generator gen(111);
  for (int n = 0; n < 1000; ++n) {
    auto p = gen.params();
    rw::BestResponseTable prev = rw::best_responses(p);
    const double c0 = p.cost;
    for (double c = c0; c < c0 + 40; c += 0.5) {
      p.cost = c;
      const auto now = rw::best_responses(p);
      for (auto k : rw::kAllThresholdKinds) {
        const auto r = rw::role_of(k);
        const auto v = rw::rival_of(k);
        ASSERT_FALSE(prev.at(r, v).strategy == Strategy::Pause &&
                     now.at(r, v).strategy == Strategy::Race);
      }
      prev = now;
    }
  }
}

TEST(Property, SafeHarmonyExcludesOtherEquilibria) {
  rw::oracle::Generator gen(112);
  for (int n = 0; n < kDraws; ++n) {
    const auto ne = rw::pure_nash(gen.params());
    ASSERT_FALSE(ne.empty());
    if (ne.contains({Strategy::Pause, Strategy::Pause})) {
      ASSERT_FALSE(ne.contains({Strategy::Pause, Strategy::Race}));
      ASSERT_FALSE(ne.contains({Strategy::Race, Strategy::Pause}));
    }
    ASSERT_FALSE(ne.contains({Strategy::Race, Strategy::Pause}));
  }
}
