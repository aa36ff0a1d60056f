#ifndef RACEWORLDS_THRESHOLDS_HPP
#define RACEWORLDS_THRESHOLDS_HPP

// Critical catastrophe costs at which a player is indifferent between
// pausing and racing, in closed form and recovered numerically from the
// expected utilities.
//
// With B = (1 - s) / sigma:
//   k_safe   = W / (1 - s) * (1 - e^{-B})
//   k_sucker = s W / (1 - s) * (e^{B} - 1)
//   FC  = k_safe   * P_lose(delta) - 1     Frontrunner, rival pauses
//   FUB = k_sucker * P_lose(delta) - 1     Frontrunner, rival races
//   LC  = k_safe   * P_win(delta)  - 1     Laggard, rival pauses
//   LUB = k_sucker * P_win(delta)  - 1     Laggard, rival races
// A player pauses iff C >= its threshold. Negative values mean pausing is
// rational at every admissible cost and are returned unclamped.
//
// Note: the published derivation writes the winner's advantage as "e" in
// one intermediate step of the FC rearrangement; it is W throughout here.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "raceworlds/equilibrium.hpp"
#include "raceworlds/game.hpp"

namespace raceworlds {

enum class ThresholdKind {
  FrontrunnerCooperation,
  FrontrunnerUnilateralBreak,
  LaggardCooperation,
  LaggardUnilateralBreak,
};

inline constexpr std::array<ThresholdKind, 4> kAllThresholdKinds{
    ThresholdKind::FrontrunnerCooperation,
    ThresholdKind::FrontrunnerUnilateralBreak,
    ThresholdKind::LaggardCooperation,
    ThresholdKind::LaggardUnilateralBreak,
};

constexpr std::string_view short_name(ThresholdKind k) {
  switch (k) {
    case ThresholdKind::FrontrunnerCooperation: return "FC";
    case ThresholdKind::FrontrunnerUnilateralBreak: return "FUB";
    case ThresholdKind::LaggardCooperation: return "LC";
    case ThresholdKind::LaggardUnilateralBreak: return "LUB";
  }
  return "?";
}

constexpr Role role_of(ThresholdKind k) {
  return k == ThresholdKind::FrontrunnerCooperation ||
                 k == ThresholdKind::FrontrunnerUnilateralBreak
             ? Role::Frontrunner
             : Role::Laggard;
}

/// Cooperation thresholds fix a pausing rival, unilateral-break ones a racer.
constexpr Strategy rival_of(ThresholdKind k) {
  return k == ThresholdKind::FrontrunnerCooperation ||
                 k == ThresholdKind::LaggardCooperation
             ? Strategy::Pause
             : Strategy::Race;
}

constexpr ThresholdKind threshold_kind_for(Role role, Strategy rival) {
  if (role == Role::Frontrunner) {
    return rival == Strategy::Pause ? ThresholdKind::FrontrunnerCooperation
                                    : ThresholdKind::FrontrunnerUnilateralBreak;
  }
  return rival == Strategy::Pause ? ThresholdKind::LaggardCooperation
                                  : ThresholdKind::LaggardUnilateralBreak;
}

namespace detail {

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace detail

/// C* + 1 for the closed-form threshold, i.e. factor * probability. Kept
/// separate because threshold() + 1 cancels badly when C* is close to -1,
/// and this is the quantity that scales linearly with W.
inline double threshold_offset(ThresholdKind kind, double delta, double winner_advantage,
                               double sigma, double s_race) {
  detail::require(std::isfinite(delta), "delta", "finite", delta);
  detail::check_winner_advantage(winner_advantage);
  detail::check_sigma(sigma);
  detail::check_s_race(s_race);

  const bool unilateral = rival_of(kind) == Strategy::Race;
  const double numer = unilateral ? s_race * winner_advantage : winner_advantage;
  if (numer == 0.0) return 0.0;

  const double b = (1.0 - s_race) / sigma;
  // Frontrunner thresholds scale with the Frontrunner's loss probability.
  const double x = role_of(kind) == Role::Frontrunner ? -delta / sigma : delta / sigma;
  const double scale = numer / (1.0 - s_race);
  const double factor = scale * (unilateral ? std::expm1(b) : -std::expm1(-b));
  const double prob = logistic(x);

  constexpr double kDirectLimit = 1e250;
  if (std::isfinite(factor) && factor < kDirectLimit && prob > 1.0 / kDirectLimit) {
    return factor * prob;
  }
  // log(expm1(b)) = b + log(1 - e^{-b}); log(logistic(x)) = -softplus(-x)
  const double log_tail = std::log(-std::expm1(-b));
  const double log_factor = std::log(scale) + (unilateral ? b + log_tail : log_tail);
  return std::exp(log_factor - detail::softplus(-x));
}

/// Closed-form threshold. `delta` may be negative (roles mirrored), which
/// makes FC(-delta) == LC(delta) and FUB(-delta) == LUB(delta).
inline double threshold(ThresholdKind kind, double delta, double winner_advantage,
                        double sigma, double s_race) {
  return threshold_offset(kind, delta, winner_advantage, sigma, s_race) - 1.0;
}

inline double threshold(ThresholdKind kind, const GameParams& p) {
  return threshold(kind, p.delta, p.winner_advantage, p.sigma, p.s_race);
}

/// Thrown when the bisection bracket [0, c_max] contains no sign change
/// although pausing does not dominate at C = 0.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBisectionTolerance = 1e-10;
inline constexpr int kBisectionMaxIterations = 200;

/// Indifference cost recovered by bisection on EU(Pause) - EU(Race) over
/// C in [0, c_max]. Returns exactly -1 when pausing already weakly
/// dominates at C = 0 ("always pause").
inline double threshold_by_bisection(ThresholdKind kind, double delta,
                                     double winner_advantage, double sigma,
                                     double s_race, double c_max) {
  GameParams p{delta, winner_advantage, 0.0, sigma, s_race};
  validate(p);
  detail::require(std::isfinite(c_max) && c_max > 0.0, "c_max", "finite and > 0", c_max);

  const Role role = role_of(kind);
  const Strategy rival = rival_of(kind);
  auto advantage_at = [&](double c) {
    p.cost = c;
    return pause_advantage(role, rival, p);
  };

  if (advantage_at(0.0) >= 0.0) return -1.0;
  if (advantage_at(c_max) < 0.0) {
    throw BracketError(std::string(short_name(kind)) + ": no pause/race crossing in [0, " +
                       std::to_string(c_max) + "]");
  }

  double lo = 0.0;
  double hi = c_max;
  for (int i = 0; i < kBisectionMaxIterations && hi - lo > kBisectionTolerance; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (advantage_at(mid) >= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Same, growing the upper bracket by doubling from 16 until it straddles
/// the crossing.
inline double threshold_by_bisection(ThresholdKind kind, double delta,
                                     double winner_advantage, double sigma,
                                     double s_race) {
  GameParams p{delta, winner_advantage, 0.0, sigma, s_race};
  validate(p);
  double c_max = 16.0;
  p.cost = c_max;
  while (pause_advantage(role_of(kind), rival_of(kind), p) < 0.0) {
    if (c_max > std::numeric_limits<double>::max() / 4) {
      throw BracketError(std::string(short_name(kind)) + ": crossing beyond double range");
    }
    c_max *= 2.0;
    p.cost = c_max;
  }
  return threshold_by_bisection(kind, delta, winner_advantage, sigma, s_race, c_max);
}

struct ThresholdCurveSample {
  double delta = 0.0;
  ThresholdKind kind = ThresholdKind::FrontrunnerCooperation;
  double c_star = 0.0;
};

inline std::vector<ThresholdCurveSample> threshold_curve(ThresholdKind kind,
                                                         std::span<const double> delta_grid,
                                                         double winner_advantage,
                                                         double sigma, double s_race) {
  if (!std::is_sorted(delta_grid.begin(), delta_grid.end())) {
    throw ParameterError("delta grid must be sorted ascending");
  }
  std::vector<ThresholdCurveSample> out;
  out.reserve(delta_grid.size());
  for (double d : delta_grid) {
    out.push_back({d, kind, threshold(kind, d, winner_advantage, sigma, s_race)});
  }
  return out;
}

/// Best responses read off the closed-form thresholds (pause iff C >= C*).
/// `pause_advantage` carries the margin C - C*; `tie` is never set.
inline BestResponseTable best_responses_by_threshold(const GameParams& params) {
  validate(params);
  BestResponseTable t;
  for (ThresholdKind k : kAllThresholdKinds) {
    const double margin = params.cost - threshold(k, params);
    t.at(role_of(k), rival_of(k)) = {margin >= 0.0 ? Strategy::Pause : Strategy::Race,
                                     false, margin};
  }
  return t;
}

inline World classify_by_thresholds(const GameParams& params) {
  return world_of(equilibria_from(best_responses_by_threshold(params)));
}

}  // namespace raceworlds

#endif  // RACEWORLDS_THRESHOLDS_HPP
