#ifndef RACEWORLDS_TESTS_ORACLE_HPP
#define RACEWORLDS_TESTS_ORACLE_HPP

// Test-only reference implementations. These follow the model's textbook
// formulas literally in long double (ratio-form shifted probabilities,
// P(lose) read as the rival's win probability, full EU subtraction) and
// share no code with the library beyond the plain enums and parameter
// struct. Complements of probabilities near 1 are taken as logistic(-x),
// since 1 - P loses every digit once P rounds to 1.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include "raceworlds/game.hpp"
#include "raceworlds/thresholds.hpp"

namespace raceworlds::oracle {

using real = long double;

inline real logistic(real x) { return 1.0L / (1.0L + std::exp(-x)); }

inline real safety(Strategy s, const GameParams& p) {
  return s == Strategy::Pause ? 1.0L : static_cast<real>(p.s_race);
}

inline real win_probability(Role role, Strategy own, Strategy rival, const GameParams& p) {
  const real x = (role == Role::Frontrunner ? 1.0L : -1.0L) * static_cast<real>(p.delta) /
                 static_cast<real>(p.sigma);
  const real base = logistic(x);
  const real complement = logistic(-x);
  const real b = (1.0L - static_cast<real>(p.s_race)) / static_cast<real>(p.sigma);
  if (own == rival) return base;
  const real e = std::exp(own == Strategy::Race ? -b : b);
  return base / (base + complement * e);
}

inline real expected_utility(Role role, Strategy own, Strategy rival, const GameParams& p) {
  const real pw = oracle::win_probability(role, own, rival, p);
  const real pl = oracle::win_probability(other(role), rival, own, p);
  const real si = safety(own, p);
  const real sj = safety(rival, p);
  const real c = p.cost;
  const real w = p.winner_advantage;
  return pw * (si - (1.0L - si) * c) + pl * (sj * (1.0L - w) - (1.0L - sj) * c);
}

inline real threshold(ThresholdKind kind, const GameParams& p) {
  const real s = p.s_race;
  const real w = p.winner_advantage;
  const real b = (1.0L - s) / static_cast<real>(p.sigma);
  const real pw = logistic(static_cast<real>(p.delta) / static_cast<real>(p.sigma));
  const real pl = logistic(-static_cast<real>(p.delta) / static_cast<real>(p.sigma));
  const real k_safe = w / (1.0L - s) * (1.0L - std::exp(-b));
  const real k_sucker = s * w / (1.0L - s) * (std::exp(b) - 1.0L);
  switch (kind) {
    case ThresholdKind::FrontrunnerCooperation: return k_safe * pl - 1.0L;
    case ThresholdKind::FrontrunnerUnilateralBreak: return k_sucker * pl - 1.0L;
    case ThresholdKind::LaggardCooperation: return k_safe * pw - 1.0L;
    case ThresholdKind::LaggardUnilateralBreak: return k_sucker * pw - 1.0L;
  }
  return 0.0L;
}

struct BruteForceResult {
  std::array<bool, 4> is_equilibrium{};  // indexed PP, PR, RP, RR
  real min_abs_difference = 0.0L;        // over the four best-response comparisons
};

/// Checks every profile for profitable unilateral deviations, with ties
/// resolved toward Pause.
inline BruteForceResult brute_force_nash(const GameParams& p) {
  BruteForceResult r;
  r.min_abs_difference = INFINITY;
  auto pause_is_best = [&](Role role, Strategy rival) {
    const real d = oracle::expected_utility(role, Strategy::Pause, rival, p) -
                   oracle::expected_utility(role, Strategy::Race, rival, p);
    r.min_abs_difference = std::fmin(r.min_abs_difference, std::fabs(d));
    return d >= 0.0L;
  };
  const bool f_pp = pause_is_best(Role::Frontrunner, Strategy::Pause);
  const bool f_pr = pause_is_best(Role::Frontrunner, Strategy::Race);
  const bool l_pp = pause_is_best(Role::Laggard, Strategy::Pause);
  const bool l_pr = pause_is_best(Role::Laggard, Strategy::Race);
  auto br = [](bool pause) { return pause ? Strategy::Pause : Strategy::Race; };
  const std::array<std::array<Strategy, 2>, 4> profiles{{{Strategy::Pause, Strategy::Pause},
                                                         {Strategy::Pause, Strategy::Race},
                                                         {Strategy::Race, Strategy::Pause},
                                                         {Strategy::Race, Strategy::Race}}};
  for (std::size_t k = 0; k < 4; ++k) {
    const Strategy f = profiles[k][0];
    const Strategy l = profiles[k][1];
    const Strategy f_best = br(l == Strategy::Pause ? f_pp : f_pr);
    const Strategy l_best = br(f == Strategy::Pause ? l_pp : l_pr);
    r.is_equilibrium[k] = f == f_best && l == l_best;
  }
  return r;
}

/// Hand-rolled generator for property tests.
class Generator {
 public:
  explicit Generator(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }

  GameParams params(double delta_max = 3.0, double c_max = 30.0) {
    GameParams p;
    p.delta = uniform(0.0, delta_max);
    p.winner_advantage = uniform(0.0, 1.0);
    p.cost = uniform(0.0, c_max);
    p.sigma = uniform(0.02, 0.5);
    p.s_race = uniform(0.5, 0.99);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace raceworlds::oracle

#endif  // RACEWORLDS_TESTS_ORACLE_HPP
