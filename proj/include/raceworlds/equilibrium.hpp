#ifndef RACEWORLDS_EQUILIBRIUM_HPP
#define RACEWORLDS_EQUILIBRIUM_HPP

// Best responses, pure Nash equilibria and the strategic-world taxonomy of
// the 2x2 pause/race game.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "raceworlds/game.hpp"

namespace raceworlds {

/// Absolute EU-difference band reported as a tie. Only flags; the decision
/// rule is always the weak inequality EU(Pause) >= EU(Race).
inline constexpr double kTieTolerance = 1e-12;

struct StrategyProfile {
  Strategy frontrunner = Strategy::Pause;
  Strategy laggard = Strategy::Pause;

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;
};

/// The four profiles in canonical order: PP, PR, RP, RR.
inline constexpr std::array<StrategyProfile, 4> kAllProfiles{{
    {Strategy::Pause, Strategy::Pause},
    {Strategy::Pause, Strategy::Race},
    {Strategy::Race, Strategy::Pause},
    {Strategy::Race, Strategy::Race},
}};

constexpr std::size_t profile_index(StrategyProfile p) {
  return (p.frontrunner == Strategy::Race ? 2u : 0u) +
         (p.laggard == Strategy::Race ? 1u : 0u);
}

constexpr Strategy own_strategy(Role role, StrategyProfile p) {
  return role == Role::Frontrunner ? p.frontrunner : p.laggard;
}

constexpr Strategy rival_strategy(Role role, StrategyProfile p) {
  return role == Role::Frontrunner ? p.laggard : p.frontrunner;
}

struct PayoffCell {
  double eu_frontrunner = 0.0;
  double eu_laggard = 0.0;
};

inline PayoffCell payoff_cell(StrategyProfile profile, const GameParams& params) {
  return {expected_utility(Role::Frontrunner, profile.frontrunner, profile.laggard, params),
          expected_utility(Role::Laggard, profile.laggard, profile.frontrunner, params)};
}

/// Payoff table indexed like kAllProfiles.
inline std::array<PayoffCell, 4> payoff_table(const GameParams& params) {
  std::array<PayoffCell, 4> table{};
  for (std::size_t i = 0; i < kAllProfiles.size(); ++i) {
    table[i] = payoff_cell(kAllProfiles[i], params);
  }
  return table;
}

struct BestResponse {
  Strategy strategy = Strategy::Pause;
  bool tie = false;
  double pause_advantage = 0.0;  // EU(Pause) - EU(Race)
};

inline BestResponse best_response(Role role, Strategy rival, const GameParams& params) {
  const double d = pause_advantage(role, rival, params);
  return {d >= 0.0 ? Strategy::Pause : Strategy::Race, std::fabs(d) <= kTieTolerance, d};
}

/// Subset of the four profiles, stored as a bitmask over kAllProfiles.
class EquilibriumSet {
 public:
  EquilibriumSet() = default;
  EquilibriumSet(std::initializer_list<StrategyProfile> profiles) {
    for (auto p : profiles) insert(p);
  }

  void insert(StrategyProfile p) { mask_ |= static_cast<std::uint8_t>(1u << profile_index(p)); }
  bool contains(StrategyProfile p) const { return (mask_ >> profile_index(p)) & 1u; }
  bool empty() const { return mask_ == 0; }
  std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
  std::uint8_t mask() const { return mask_; }

  std::vector<StrategyProfile> profiles() const {
    std::vector<StrategyProfile> out;
    for (auto p : kAllProfiles) {
      if (contains(p)) out.push_back(p);
    }
    return out;
  }

  // Per-player flag: some best-response comparison was within kTieTolerance.
  std::array<bool, 2> tie_flags{false, false};

  bool tie(Role r) const { return tie_flags[r == Role::Frontrunner ? 0 : 1]; }

  friend bool operator==(const EquilibriumSet& a, const EquilibriumSet& b) {
    return a.mask_ == b.mask_;
  }

 private:
  std::uint8_t mask_ = 0;
};

/// The four best-response decisions of one game, indexed [role][rival].
struct BestResponseTable {
  std::array<std::array<BestResponse, 2>, 2> entries{};

  const BestResponse& at(Role role, Strategy rival) const {
    return entries[role == Role::Frontrunner ? 0 : 1][rival == Strategy::Pause ? 0 : 1];
  }
  BestResponse& at(Role role, Strategy rival) {
    return entries[role == Role::Frontrunner ? 0 : 1][rival == Strategy::Pause ? 0 : 1];
  }
};

inline BestResponseTable best_responses(const GameParams& params) {
  BestResponseTable t;
  for (Role role : {Role::Frontrunner, Role::Laggard}) {
    for (Strategy rival : {Strategy::Pause, Strategy::Race}) {
      t.at(role, rival) = best_response(role, rival, params);
    }
  }
  return t;
}

/// Profiles where each player's strategy is its best response to the other's.
inline EquilibriumSet equilibria_from(const BestResponseTable& br) {
  EquilibriumSet set;
  for (auto p : kAllProfiles) {
    if (br.at(Role::Frontrunner, p.laggard).strategy == p.frontrunner &&
        br.at(Role::Laggard, p.frontrunner).strategy == p.laggard) {
      set.insert(p);
    }
  }
  for (Role role : {Role::Frontrunner, Role::Laggard}) {
    set.tie_flags[role == Role::Frontrunner ? 0 : 1] =
        br.at(role, Strategy::Pause).tie || br.at(role, Strategy::Race).tie;
  }
  return set;
}

inline EquilibriumSet pure_nash(const GameParams& params) {
  return equilibria_from(best_responses(params));
}

enum class World {
  SafeHarmony,        // {(P,P)}
  Trust,              // {(P,P), (R,R)}
  Subversion,         // {(P,R)}: Frontrunner pauses, Laggard races
  Preemption,         // {(R,R)}
  ReverseSubversion,  // {(R,P)}
  AntiCoordination,   // {(P,R), (R,P)}
  NoPureEquilibrium,  // {}
};

inline constexpr std::array<World, 7> kAllWorlds{
    World::SafeHarmony,       World::Trust,            World::Subversion,
    World::Preemption,        World::ReverseSubversion, World::AntiCoordination,
    World::NoPureEquilibrium,
};

constexpr std::size_t world_index(World w) { return static_cast<std::size_t>(w); }

constexpr std::string_view to_string(World w) {
  switch (w) {
    case World::SafeHarmony: return "SafeHarmony";
    case World::Trust: return "Trust";
    case World::Subversion: return "Subversion";
    case World::Preemption: return "Preemption";
    case World::ReverseSubversion: return "ReverseSubversion";
    case World::AntiCoordination: return "AntiCoordination";
    case World::NoPureEquilibrium: return "NoPureEquilibrium";
  }
  return "?";
}

/// The four worlds that appear in the standard phase maps.
constexpr bool is_principal(World w) {
  return w == World::SafeHarmony || w == World::Trust || w == World::Subversion ||
         w == World::Preemption;
}

/// Total map from an equilibrium set to a world label.
///
/// Best responses are deterministic, so each rival strategy supports at most
/// one equilibrium and two equilibria must differ in both coordinates. The
/// sets below are therefore every set a 2x2 game can produce.
inline World world_of(const EquilibriumSet& ne) {
  constexpr StrategyProfile pp{Strategy::Pause, Strategy::Pause};
  constexpr StrategyProfile pr{Strategy::Pause, Strategy::Race};
  constexpr StrategyProfile rp{Strategy::Race, Strategy::Pause};
  constexpr StrategyProfile rr{Strategy::Race, Strategy::Race};
  if (ne.empty()) return World::NoPureEquilibrium;
  if (ne == EquilibriumSet{pp}) return World::SafeHarmony;
  if (ne == EquilibriumSet{pp, rr}) return World::Trust;
  if (ne == EquilibriumSet{rr}) return World::Preemption;
  if (ne == EquilibriumSet{pr}) return World::Subversion;
  if (ne == EquilibriumSet{rp}) return World::ReverseSubversion;
  if (ne == EquilibriumSet{pr, rp}) return World::AntiCoordination;
  throw std::logic_error("equilibrium set with " + std::to_string(ne.size()) +
                         " profiles is not producible by a 2x2 game");
}

inline World classify_world(const GameParams& params) { return world_of(pure_nash(params)); }

}  // namespace raceworlds

#endif  // RACEWORLDS_EQUILIBRIUM_HPP
