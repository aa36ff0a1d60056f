#ifndef RACEWORLDS_VERIFY_HPP
#define RACEWORLDS_VERIFY_HPP

// Randomized self-check of the closed forms against the expected utilities.
//
// Each sample draws delta in [0,3], W in [0,1], sigma in [0.02,0.5],
// s_race in [0.5,0.99] and C in [0,30] and checks:
//   threshold    closed form vs bisection on EU(Pause) - EU(Race)
//   predicate    C >= C* vs the sign of EU(Pause) - EU(Race), off the tie band
//   conservation both players' win probabilities sum to 1
//
// Sampling uses std::mt19937_64 (bit-exact on every conforming platform)
// with a 53-bit mantissa mapping to [0,1), so a seed reproduces the same
// parameter tuples everywhere.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "raceworlds/equilibrium.hpp"
#include "raceworlds/game.hpp"
#include "raceworlds/thresholds.hpp"

namespace raceworlds {

inline constexpr std::uint64_t kDefaultVerifySeed = 20240229;
inline constexpr double kOracleTolerance = 1e-9;
inline constexpr double kVerifyTieBand = 1e-9;
inline constexpr double kConservationTolerance = 1e-12;

class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double between(double lo, double hi) { return lo + (hi - lo) * unit(); }

 private:
  std::mt19937_64 engine_;
};

/// Draws one tuple from the verification ranges.
inline GameParams draw_params(UniformSource& rng) {
  GameParams p;
  p.delta = rng.between(0.0, 3.0);
  p.winner_advantage = rng.between(0.0, 1.0);
  p.sigma = rng.between(0.02, 0.5);
  p.s_race = rng.between(0.5, 0.99);
  p.cost = rng.between(0.0, 30.0);
  return p;
}

struct VerifyOptions {
  std::uint64_t seed = kDefaultVerifySeed;
  std::size_t samples = 10000;
  // Added to every closed-form threshold. Nonzero only to prove the suite
  // notices a wrong constant.
  double threshold_bias = 0.0;
};

struct Counterexample {
  std::size_t sample = 0;
  std::string check;
  GameParams params;
  std::string detail;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t passed = 0;
  std::size_t failure_count = 0;
  std::vector<Counterexample> failures;  // first few only

  bool ok() const { return passed == samples; }
};

inline bool threshold_matches(double closed, double bisected) {
  if (bisected == -1.0) return closed <= kOracleTolerance;
  return std::fabs(closed - bisected) <= kOracleTolerance * std::max(1.0, std::fabs(closed));
}

inline VerifyReport run_verification(const VerifyOptions& opts,
                                     std::size_t max_recorded = 10) {
  VerifyReport report;
  report.seed = opts.seed;
  report.samples = opts.samples;
  UniformSource rng(opts.seed);

  for (std::size_t n = 0; n < opts.samples; ++n) {
    const GameParams p = draw_params(rng);
    bool sample_ok = true;
    auto fail = [&](std::string check, std::string detail) {
      sample_ok = false;
      if (report.failures.size() < max_recorded) {
        report.failures.push_back({n, std::move(check), p, std::move(detail)});
      }
    };

    for (ThresholdKind k : kAllThresholdKinds) {
      const double closed = threshold(k, p) + opts.threshold_bias;
      const std::string name(short_name(k));
      try {
        const double bisected =
            threshold_by_bisection(k, p.delta, p.winner_advantage, p.sigma, p.s_race);
        if (!threshold_matches(closed, bisected)) {
          fail("threshold", name + " closed=" + std::to_string(closed) +
                                " bisection=" + std::to_string(bisected));
        }
      } catch (const BracketError& e) {
        fail("threshold", name + " " + e.what());
      }

      const double d = pause_advantage(role_of(k), rival_of(k), p);
      if (std::fabs(d) > kVerifyTieBand && ((p.cost >= closed) != (d >= 0.0))) {
        fail("predicate", name + " C*=" + std::to_string(closed) +
                              " EU(Pause)-EU(Race)=" + std::to_string(d));
      }
    }

    for (auto profile : kAllProfiles) {
      const double sum =
          win_probability(Role::Frontrunner, profile.frontrunner, profile.laggard, p) +
          win_probability(Role::Laggard, profile.laggard, profile.frontrunner, p);
      if (std::fabs(sum - 1.0) > kConservationTolerance) {
        fail("conservation", std::string(to_string(profile.frontrunner)) + "/" +
                                 std::string(to_string(profile.laggard)) +
                                 " sum=" + std::to_string(sum));
      }
    }

    if (sample_ok) {
      ++report.passed;
    } else {
      ++report.failure_count;
    }
  }
  return report;
}

}  // namespace raceworlds

#endif  // RACEWORLDS_VERIFY_HPP
