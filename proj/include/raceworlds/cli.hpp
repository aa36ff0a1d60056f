#ifndef RACEWORLDS_CLI_HPP
#define RACEWORLDS_CLI_HPP

// `raceworlds` command line: analyze, phase and verify.
//
// Exit codes: 0 success, 1 property failure, 2 usage or parameter error,
// 3 output write failure.
//
// Settings are resolved as: built-in defaults, then the preset named in the
// --config file, then the config file's values, then --preset, then
// explicit flags.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "raceworlds/equilibrium.hpp"
#include "raceworlds/game.hpp"
#include "raceworlds/phase_map.hpp"
#include "raceworlds/thresholds.hpp"
#include "raceworlds/verify.hpp"

namespace raceworlds::cli {

enum ExitCode : int { kOk = 0, kPropertyFailure = 1, kUsage = 2, kWriteFailure = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw option values as given on the command line; unset means "not given".
struct FlagValues {
  std::optional<double> delta, cost, winner_advantage, sigma, race_safety;
  std::optional<std::string> preset, grid, out, format, config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  double threshold_bias = 0.0;
};

/// Fully resolved settings for one invocation.
struct RunConfig {
  GameParams params;
  SweepSpec sweep;
  std::string format;  // empty = subcommand default
  std::optional<std::string> out;
  std::uint64_t seed = kDefaultVerifySeed;
  std::size_t samples = 10000;
  double threshold_bias = 0.0;
};

inline std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  std::size_t n = 0, m = 0;
  if (x != std::string::npos) {
    auto parse = [](const std::string& s, std::size_t& v) {
      if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
      v = std::stoul(s);
      return true;
    };
    if (parse(text.substr(0, x), n) && parse(text.substr(x + 1), m) && n >= 2 && m >= 2) {
      return {n, m};
    }
  }
  throw UsageError("--grid must look like NxM with N, M >= 2 (got '" + text + "')");
}

namespace detail {

inline void apply_preset(RunConfig& rc, const std::string& name) {
  const auto preset = parse_preset(name);
  if (!preset) {
    throw UsageError("unknown preset '" + name + "' (expected figure1, figure2 or figure3)");
  }
  const SweepSpec s = preset_spec(*preset);
  rc.params.winner_advantage = rc.sweep.winner_advantage = s.winner_advantage;
  rc.params.sigma = rc.sweep.sigma = s.sigma;
  rc.params.s_race = rc.sweep.s_race = s.s_race;
}

inline void apply_values(RunConfig& rc, const FlagValues& v) {
  if (v.delta) rc.params.delta = *v.delta;
  if (v.cost) rc.params.cost = *v.cost;
  if (v.winner_advantage) rc.params.winner_advantage = rc.sweep.winner_advantage = *v.winner_advantage;
  if (v.sigma) rc.params.sigma = rc.sweep.sigma = *v.sigma;
  if (v.race_safety) rc.params.s_race = rc.sweep.s_race = *v.race_safety;
  if (v.grid) std::tie(rc.sweep.delta_steps, rc.sweep.c_steps) = parse_grid(*v.grid);
  if (v.out) rc.out = *v.out;
  if (v.format) rc.format = *v.format;
  if (v.seed) rc.seed = *v.seed;
  if (v.samples) rc.samples = *v.samples;
}

inline FlagValues read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a flat JSON object");

  FlagValues v;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "delta") v.delta = value.get<double>();
      else if (key == "cost") v.cost = value.get<double>();
      else if (key == "winner-advantage") v.winner_advantage = value.get<double>();
      else if (key == "sigma") v.sigma = value.get<double>();
      else if (key == "race-safety") v.race_safety = value.get<double>();
      else if (key == "preset") v.preset = value.get<std::string>();
      else if (key == "grid") v.grid = value.get<std::string>();
      else if (key == "out") v.out = value.get<std::string>();
      else if (key == "format") v.format = value.get<std::string>();
      else if (key == "seed") v.seed = value.get<std::uint64_t>();
      else if (key == "samples") v.samples = value.get<std::size_t>();
      else throw UsageError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + path + "': " + e.what());
  }
  return v;
}

}  // namespace detail

inline RunConfig resolve(const FlagValues& flags) {
  RunConfig rc;
  if (flags.config) {
    const FlagValues file = detail::read_config(*flags.config);
    if (file.preset) detail::apply_preset(rc, *file.preset);
    detail::apply_values(rc, file);
  }
  if (flags.preset) detail::apply_preset(rc, *flags.preset);
  detail::apply_values(rc, flags);
  rc.threshold_bias = flags.threshold_bias;
  return rc;
}

namespace detail {

inline std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

inline std::string profile_name(StrategyProfile p) {
  return "(" + std::string(to_string(p.frontrunner)) + ", " + std::string(to_string(p.laggard)) + ")";
}

// Writes `text` to --out when given, else to `out`.
inline void deliver(const std::optional<std::string>& path, const std::string& text,
                    std::ostream& out) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream f(*path, std::ios::binary);
  if (!f) throw WriteError("cannot open '" + *path + "' for writing");
  f << text;
  f.flush();
  if (!f) throw WriteError("write to '" + *path + "' failed");
}

inline unsigned sweep_threads_from_env() {
  const char* env = std::getenv("RACEWORLDS_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  const std::string s(env);
  if (s.find_first_not_of("0123456789") != std::string::npos || s.size() > 6) {
    throw UsageError("RACEWORLDS_THREADS must be a non-negative integer (got '" + s + "')");
  }
  return static_cast<unsigned>(std::stoul(s));
}

}  // namespace detail

inline nlohmann::json analysis_json(const GameParams& p, bool roles_swapped) {
  using nlohmann::json;
  const auto table = payoff_table(p);
  const auto br = best_responses(p);
  const auto ne = equilibria_from(br);

  json j;
  j["params"] = {{"delta", p.delta},   {"cost", p.cost},   {"winner_advantage", p.winner_advantage},
                 {"sigma", p.sigma},   {"s_race", p.s_race}};
  j["roles_swapped"] = roles_swapped;
  j["payoff_table"] = json::array();
  for (std::size_t i = 0; i < kAllProfiles.size(); ++i) {
    j["payoff_table"].push_back({{"frontrunner", to_string(kAllProfiles[i].frontrunner)},
                                 {"laggard", to_string(kAllProfiles[i].laggard)},
                                 {"eu_frontrunner", table[i].eu_frontrunner},
                                 {"eu_laggard", table[i].eu_laggard}});
  }
  j["best_responses"] = json::array();
  for (Role role : {Role::Frontrunner, Role::Laggard}) {
    for (Strategy rival : {Strategy::Pause, Strategy::Race}) {
      const auto& r = br.at(role, rival);
      j["best_responses"].push_back({{"role", to_string(role)},
                                     {"rival", to_string(rival)},
                                     {"response", to_string(r.strategy)},
                                     {"tie", r.tie}});
    }
  }
  j["equilibria"] = json::array();
  for (auto prof : ne.profiles()) {
    j["equilibria"].push_back(
        {{"frontrunner", to_string(prof.frontrunner)}, {"laggard", to_string(prof.laggard)}});
  }
  j["world"] = to_string(world_of(ne));
  j["thresholds"] = json::object();
  for (ThresholdKind k : kAllThresholdKinds) j["thresholds"][std::string(short_name(k))] = threshold(k, p);
  return j;
}

inline std::string analysis_table(const GameParams& p, bool roles_swapped) {
  using detail::fixed6;
  const auto table = payoff_table(p);
  const auto br = best_responses(p);
  const auto ne = equilibria_from(br);

  std::ostringstream os;
  os << "parameters: delta=" << fixed6(p.delta) << " cost=" << fixed6(p.cost)
     << " W=" << fixed6(p.winner_advantage) << " sigma=" << fixed6(p.sigma)
     << " s_race=" << fixed6(p.s_race) << "\n";
  if (roles_swapped) os << "note: negative delta, player 1 is the Laggard\n";
  os << "\npayoff table\n";
  os << "  profile (F, L)      EU frontrunner  EU laggard\n";
  for (std::size_t i = 0; i < kAllProfiles.size(); ++i) {
    os << "  " << std::left << std::setw(20) << detail::profile_name(kAllProfiles[i])
       << std::right << std::setw(14) << fixed6(table[i].eu_frontrunner) << std::setw(12)
       << fixed6(table[i].eu_laggard) << "\n";
  }
  os << "\nbest responses\n";
  for (Role role : {Role::Frontrunner, Role::Laggard}) {
    for (Strategy rival : {Strategy::Pause, Strategy::Race}) {
      const auto& r = br.at(role, rival);
      os << "  " << std::left << std::setw(12) << to_string(role) << " vs " << std::setw(6)
         << to_string(rival) << "-> " << to_string(r.strategy) << (r.tie ? "  (tie)" : "")
         << "\n";
    }
  }
  os << "\nequilibria: ";
  if (ne.empty()) os << "none";
  bool first = true;
  for (auto prof : ne.profiles()) {
    os << (first ? "" : ", ") << detail::profile_name(prof);
    first = false;
  }
  os << "\nworld: " << to_string(world_of(ne)) << "\n";
  os << "\nthresholds at this delta\n";
  for (ThresholdKind k : kAllThresholdKinds) {
    os << "  " << std::left << std::setw(4) << short_name(k) << std::right << std::setw(14)
       << fixed6(threshold(k, p)) << "\n";
  }
  return os.str();
}

inline int cmd_analyze(const RunConfig& rc, std::ostream& out) {
  const auto fmt = rc.format.empty() ? std::string("table") : rc.format;
  if (fmt != "table" && fmt != "json") {
    throw UsageError("analyze supports --format table or json (got '" + fmt + "')");
  }
  const NormalizedParams np = normalize_roles(rc.params);
  const std::string text = fmt == "json" ? analysis_json(np.params, np.roles_swapped).dump(2) + "\n"
                                         : analysis_table(np.params, np.roles_swapped);
  detail::deliver(rc.out, text, out);
  return kOk;
}

inline std::string area_summary(const PhaseGrid& grid) {
  const RegionAreas areas = region_areas(grid);
  std::ostringstream os;
  os << "grid " << grid.spec.delta_steps << "x" << grid.spec.c_steps << " W="
     << raceworlds::detail::format_g9(grid.spec.winner_advantage) << " sigma="
     << raceworlds::detail::format_g9(grid.spec.sigma) << " s_race=" << raceworlds::detail::format_g9(grid.spec.s_race)
     << "\n";
  for (World w : kAllWorlds) {
    if (is_principal(w) || areas.of(w) > 0.0) {
      os << "  " << std::left << std::setw(18) << to_string(w) << detail::fixed6(areas.of(w))
         << "\n";
    }
  }
  return os.str();
}

inline int cmd_phase(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const std::string& fmt = rc.format;
  if (!fmt.empty() && fmt != "csv" && fmt != "svg" && fmt != "table" && fmt != "json") {
    throw UsageError("phase supports --format csv, svg, table or json (got '" + fmt + "')");
  }
  const PhaseGrid grid = sweep(rc.sweep, detail::sweep_threads_from_env());
  auto render = [&](bool csv) {
    std::ostringstream os;
    csv ? emit_csv(grid, os) : render_svg(grid, os);
    return os.str();
  };

  if (fmt.empty()) {
    const std::string prefix = rc.out.value_or("phase");
    detail::deliver(prefix + ".csv", render(true), out);
    detail::deliver(prefix + ".svg", render(false), out);
    out << area_summary(grid);
    out << "wrote " << prefix << ".csv and " << prefix << ".svg\n";
  } else if (fmt == "csv" || fmt == "svg") {
    detail::deliver(rc.out, render(fmt == "csv"), out);
    // Keep stdout clean when the artifact itself goes there.
    (rc.out ? out : err) << area_summary(grid);
  } else if (fmt == "table") {
    detail::deliver(rc.out, area_summary(grid), out);
  } else {
    const RegionAreas areas = region_areas(grid);
    nlohmann::json j;
    j["grid"] = {grid.spec.delta_steps, grid.spec.c_steps};
    j["params"] = {{"winner_advantage", grid.spec.winner_advantage},
                   {"sigma", grid.spec.sigma},
                   {"s_race", grid.spec.s_race}};
    for (World w : kAllWorlds) j["areas"][std::string(to_string(w))] = areas.of(w);
    detail::deliver(rc.out, j.dump(2) + "\n", out);
  }
  return kOk;
}

inline int cmd_verify(const RunConfig& rc, std::ostream& out) {
  VerifyOptions opts;
  opts.seed = rc.seed;
  opts.samples = rc.samples;
  opts.threshold_bias = rc.threshold_bias;
  const VerifyReport report = run_verification(opts);

  std::ostringstream os;
  os << "verify: seed=" << report.seed << " samples=" << report.samples << "\n";
  for (const auto& c : report.failures) {
    os << std::setprecision(17) << "counterexample #" << c.sample << " [" << c.check
       << "] delta=" << c.params.delta << " W=" << c.params.winner_advantage
       << " sigma=" << c.params.sigma << " s_race=" << c.params.s_race
       << " cost=" << c.params.cost << ": " << c.detail << "\n";
  }
  if (report.failure_count > report.failures.size()) {
    os << "... " << report.failure_count - report.failures.size() << " more failing samples\n";
  }
  os << report.passed << "/" << report.samples << " passed\n";
  if (!report.ok()) {
    os << "reproduce with: raceworlds verify --seed " << report.seed << " --samples "
       << report.samples << "\n";
  }
  detail::deliver(rc.out, os.str(), out);
  return report.ok() ? kOk : kPropertyFailure;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium analysis of the two-player pause/race game", "raceworlds"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  FlagValues v;
  auto add_common = [&](CLI::App* sub, bool point, bool sweep_opts) {
    if (point) {
      sub->add_option("--delta", v.delta, "Frontrunner's capability lead (negative swaps roles)");
      sub->add_option("--cost", v.cost, "Catastrophic cost C >= 0");
    }
    sub->add_option("--winner-advantage", v.winner_advantage, "Winner's advantage W in [0,1]");
    sub->add_option("--sigma", v.sigma, "Technological uncertainty sigma > 0");
    sub->add_option("--race-safety", v.race_safety, "Safety level when racing, in [0,1)");
    sub->add_option("--preset", v.preset, "figure1 | figure2 | figure3");
    if (sweep_opts) sub->add_option("--grid", v.grid, "Sweep resolution NxM (delta x cost)");
    sub->add_option("--out", v.out, "Output path");
    sub->add_option("--format", v.format, "csv | svg | json | table");
    sub->add_option("--config", v.config, "Flat JSON file with default flag values");
  };

  auto* analyze = app.add_subcommand("analyze", "Analyze one (delta, C) point");
  add_common(analyze, true, false);
  auto* phase = app.add_subcommand("phase", "Sweep the (delta, C) plane and write CSV/SVG");
  add_common(phase, false, true);
  auto* verify = app.add_subcommand("verify", "Run the randomized oracle and property checks");
  verify->add_option("--seed", v.seed, "Seed for the parameter generator");
  verify->add_option("--samples", v.samples, "Number of random parameter tuples");
  verify->add_option("--out", v.out, "Write the report to a file");
  verify->add_option("--config", v.config, "Flat JSON file with default flag values");
  verify->add_option("--inject-threshold-bias", v.threshold_bias)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    const RunConfig rc = resolve(v);
    if (analyze->parsed()) return cmd_analyze(rc, out);
    if (phase->parsed()) return cmd_phase(rc, out, err);
    return cmd_verify(rc, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParameterError& e) {
    err << "error: invalid parameter: " << e.what() << "\n";
    return kUsage;
  } catch (const WriteError& e) {
    err << "error: " << e.what() << "\n";
    return kWriteFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kWriteFailure;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"raceworlds"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace raceworlds::cli

#endif  // RACEWORLDS_CLI_HPP
