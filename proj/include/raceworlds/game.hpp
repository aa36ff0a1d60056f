#ifndef RACEWORLDS_GAME_HPP
#define RACEWORLDS_GAME_HPP

// Two-player pause/race game: parameters, contest probabilities and
// expected utilities.
//
// Payoffs are normalized so a safe win is worth 1 and a safe loss 1 - W.
// A winner whose effective safety is s avoids catastrophe with probability s;
// catastrophe costs both players C regardless of who triggered it.

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace raceworlds {

/// Thrown when a parameter lies outside its admissible range. The message
/// names the parameter and the range it violated.
class ParameterError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Strategy { Pause, Race };
enum class Role { Frontrunner, Laggard };

constexpr Role other(Role r) {
  return r == Role::Frontrunner ? Role::Laggard : Role::Frontrunner;
}

constexpr std::string_view to_string(Strategy s) {
  return s == Strategy::Pause ? "Pause" : "Race";
}

constexpr std::string_view to_string(Role r) {
  return r == Role::Frontrunner ? "Frontrunner" : "Laggard";
}

/// One game instance. Defaults are the "informed enemies" regime
/// (W = 1, sigma = 0.1) with the standard racing safety of 0.85.
struct GameParams {
  double delta = 0.0;             // Frontrunner's capability lead, >= 0
  double winner_advantage = 1.0;  // W in [0, 1]
  double cost = 0.0;              // C >= 0, may exceed 1
  double sigma = 0.1;             // technological uncertainty, > 0
  double s_race = 0.85;           // safety when racing, in [0, 1)

  friend bool operator==(const GameParams&, const GameParams&) = default;
};

namespace detail {

inline void require(bool ok, std::string_view name, std::string_view range,
                    double value) {
  if (!ok) {
    throw ParameterError(std::string(name) + " must be " + std::string(range) +
                         " (got " + std::to_string(value) + ")");
  }
}

inline void check_sigma(double sigma) {
  require(std::isfinite(sigma) && sigma > 0.0, "sigma", "finite and > 0", sigma);
}

inline void check_s_race(double s) {
  require(s >= 0.0 && s < 1.0, "s_race", "in [0, 1)", s);
}

inline void check_winner_advantage(double w) {
  require(w >= 0.0 && w <= 1.0, "winner_advantage", "in [0, 1]", w);
}

}  // namespace detail

/// Throws ParameterError unless every field satisfies its invariant.
inline void validate(const GameParams& p) {
  detail::require(std::isfinite(p.delta) && p.delta >= 0.0, "delta",
                  "finite and >= 0", p.delta);
  detail::check_winner_advantage(p.winner_advantage);
  detail::require(std::isfinite(p.cost) && p.cost >= 0.0, "cost",
                  "finite and >= 0", p.cost);
  detail::check_sigma(p.sigma);
  detail::check_s_race(p.s_race);
}

/// A signed capability lead folded onto delta >= 0. When the input lead is
/// negative, player 1 is the Laggard and `roles_swapped` is set.
struct NormalizedParams {
  GameParams params;
  bool roles_swapped = false;
};

inline NormalizedParams normalize_roles(GameParams p) {
  const bool swapped = std::signbit(p.delta) && p.delta != 0.0;
  p.delta = std::fabs(p.delta);
  validate(p);
  return {p, swapped};
}

/// 1 / (1 + e^{-x}) without overflow; saturates to exactly 0 or 1.
inline double logistic(double x) {
  const double t = std::exp(-std::fabs(x));
  return x >= 0.0 ? 1.0 / (1.0 + t) : t / (1.0 + t);
}

/// B = (1 - s) / sigma, the racing speed advantage against a pauser.
inline double boost_constant(double s_race, double sigma) {
  detail::check_s_race(s_race);
  detail::check_sigma(sigma);
  return (1.0 - s_race) / sigma;
}

inline double p_win(double delta, double sigma) {
  detail::check_sigma(sigma);
  return logistic(delta / sigma);
}

inline double p_lose(double delta, double sigma) {
  detail::check_sigma(sigma);
  return logistic(-delta / sigma);
}

enum class ShiftDirection { RacingVsPauser, PausingVsRacer };

/// Base win probability shifted by the racing boost:
///   RacingVsPauser:  P / (P + (1 - P) e^{-B})
///   PausingVsRacer:  P / (P + (1 - P) e^{+B})
inline double shifted_win_prob(double base_p, double boost, ShiftDirection dir) {
  detail::require(base_p > 0.0 && base_p < 1.0, "base probability", "in (0, 1)",
                  base_p);
  detail::require(boost >= 0.0, "boost", ">= 0", boost);
  const double e = std::exp(dir == ShiftDirection::RacingVsPauser ? -boost : boost);
  return base_p / (base_p + (1.0 - base_p) * e);
}

constexpr double effective_safety(Strategy s, double s_race) {
  return s == Strategy::Pause ? 1.0 : s_race;
}

namespace detail {

// Log-odds of `role` winning. Shifting the base log-odds by +-B is the same
// map as shifted_win_prob but stays finite when the base probability
// rounds to 0 or 1.
inline double win_log_odds(Role role, Strategy own, Strategy rival,
                           const GameParams& p) {
  const double base = (role == Role::Frontrunner ? p.delta : -p.delta) / p.sigma;
  if (own == rival) return base;
  const double b = (1.0 - p.s_race) / p.sigma;
  return own == Strategy::Race ? base + b : base - b;
}

}  // namespace detail

inline double win_probability(Role role, Strategy own, Strategy rival,
                              const GameParams& params) {
  validate(params);
  return logistic(detail::win_log_odds(role, own, rival, params));
}

/// Payoff to a player who wins with effective safety `own`.
inline double win_payoff(Strategy own, const GameParams& p) {
  const double s = effective_safety(own, p.s_race);
  return s - (1.0 - s) * p.cost;
}

/// Payoff to a player whose rival wins with effective safety `rival`.
inline double lose_payoff(Strategy rival, const GameParams& p) {
  const double s = effective_safety(rival, p.s_race);
  return s * (1.0 - p.winner_advantage) - (1.0 - s) * p.cost;
}

inline double expected_utility(Role role, Strategy own, Strategy rival,
                               const GameParams& params) {
  validate(params);
  const double z = detail::win_log_odds(role, own, rival, params);
  return logistic(z) * win_payoff(own, params) +
         logistic(-z) * lose_payoff(rival, params);
}

/// win_payoff(own) - lose_payoff(rival), with the catastrophe terms
/// combined first: (s_own - s_rival)(1 + C) + s_rival W.
inline double win_premium(Strategy own, Strategy rival, const GameParams& p) {
  const double so = effective_safety(own, p.s_race);
  const double sr = effective_safety(rival, p.s_race);
  return (so - sr) * (1.0 + p.cost) + sr * p.winner_advantage;
}

/// EU(Pause) - EU(Race) against a fixed rival strategy.
///
/// The loss payoff depends only on the rival, so it cancels:
///   diff = P_pause * premium(Pause) - P_race * premium(Race)
/// which keeps full relative precision when both win probabilities are tiny
/// or C is large.
inline double pause_advantage(Role role, Strategy rival, const GameParams& params) {
  validate(params);
  const double p_pause = logistic(detail::win_log_odds(role, Strategy::Pause, rival, params));
  const double p_race = logistic(detail::win_log_odds(role, Strategy::Race, rival, params));
  return p_pause * win_premium(Strategy::Pause, rival, params) -
         p_race * win_premium(Strategy::Race, rival, params);
}

}  // namespace raceworlds

#endif  // RACEWORLDS_GAME_HPP
