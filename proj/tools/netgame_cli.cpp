// Command-line front end: analyze a scenario, simulate one protocol, or sweep
// protocols x seeds. All artifacts are CSV/JSON for external plotting.
//
// Exit codes:
//   0  success
//   1  scenario unreadable or invalid, bad arguments
//   2  analyze: social optimum not unique (Assumption 2 fails); analysis still written
//   3  analyze: no admissible intervention supports the social optimum
//   4  simulate: no convergence within t_max, divergence, or Lyapunov violations
//   5  simulate: protocol precondition failed (the error name is printed)

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netgame/equilibria.hpp"
#include "netgame/error.hpp"
#include "netgame/protocols.hpp"
#include "netgame/scenarios.hpp"
#include "netgame/sim.hpp"

namespace fs = std::filesystem;
using namespace netgame;

namespace {

enum Exit : int {
  kOk = 0,
  kBadInput = 1,
  kAssumption2 = 2,
  kAssumption3 = 3,
  kNotConverged = 4,
  kPrecondition = 5,
};

struct Overrides {
  std::optional<std::string> protocol;
  std::optional<double> h;
  std::optional<double> t_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> stride;
};

struct CellResult {
  int exit_code = kOk;
  std::string message;
  bool converged = false;
  double final_error = 0.0;
  std::size_t lyapunov_violations = 0;
};

/// x0 + uniform(-1, 1) noise drawn from the seed.
Vector perturbed_start(const Vector& x0, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector x = x0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] += 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  }
  return x;
}

ScenarioSpec apply_overrides(ScenarioSpec spec, const Overrides& o) {
  if (o.protocol) {
    auto kind = parse_protocol_kind(*o.protocol);
    if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown protocol '" + *o.protocol + "'");
    spec.protocol = *kind;
  }
  if (o.h) spec.sim.h = *o.h;
  if (o.t_max) spec.sim.t_max = *o.t_max;
  if (o.stride) spec.sim.record_stride = *o.stride;
  if (o.seed) spec.x0 = perturbed_start(spec.x0, *o.seed);
  spec.sim.validate();
  return spec;
}

/// Harness: computes the references the controllers are not allowed to see,
/// builds the protocol, runs it, writes artifacts into `out`.
CellResult run_simulation(const ScenarioSpec& spec, const fs::path& out) {
  CellResult result;
  const NetworkGame& game = spec.game;
  const AnalysisReport report = analyze_game(game);
  if (!report.assumptions.assumption2_ok) {
    result.exit_code = kPrecondition;
    result.message = "Assumption2Violated: the social optimum is not unique";
    return result;
  }
  const Vector& x_opt = *report.x_opt;

  ProtocolOptions options;
  options.x0 = spec.x0;
  options.x_opt = x_opt;
  options.skip_target_check = spec.skip_target_check;
  Vector target = x_opt;
  LyapunovReference refs;
  refs.x_opt = x_opt;
  refs.aP = game.a() * game.P();
  if (spec.protocol == ProtocolKind::Dynamic) {
    target = spec.x_s.value_or(x_opt);
    options.x_s = target;
  }

  ProtocolState state;
  try {
    state = make_protocol(spec.protocol, game, options);
    if (spec.protocol == ProtocolKind::Dynamic) {
      const auto verdict = optimal_intervention(game, target);
      if (!verdict.feasible) {
        throw Error(ErrorCode::TargetNotAssignable,
                    "monitor needs a steady intervention for x_s and none exists");
      }
      refs.u_s = *verdict.u_opt;
    }
  } catch (const Error& e) {
    result.exit_code = kPrecondition;
    result.message = e.what();
    return result;
  }

  Trajectory traj;
  try {
    traj = simulate(game, std::move(state), spec.x0, spec.sim, target, refs);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Divergence) throw;
    result.exit_code = kNotConverged;
    result.message = e.what();
    return result;
  }
  const auto metrics =
      convergence_metrics(traj, target, spec.sim.conv_tol, spec.sim.h, spec.sim.lyapunov_slack);
  save_results(traj, metrics, report, out);

  result.converged = traj.converged;
  result.final_error = metrics.final_error;
  result.lyapunov_violations = metrics.lyapunov_violations + traj.step_lyapunov_violations;
  if (!traj.converged) {
    result.exit_code = kNotConverged;
    std::ostringstream msg;
    msg << "did not reach conv_tol within t_max (final error " << metrics.final_error << ")";
    result.message = msg.str();
  } else if (result.lyapunov_violations > 0) {
    result.exit_code = kNotConverged;
    result.message = "Lyapunov function increased " + std::to_string(result.lyapunov_violations) +
                     " times beyond the slack";
  }
  return result;
}

std::optional<ScenarioSpec> load_or_report(const std::string& path) {
  try {
    return load_scenario(path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return std::nullopt;
}

int cmd_analyze(const std::string& scenario_path, const fs::path& out) {
  auto spec = load_or_report(scenario_path);
  if (!spec) return kBadInput;
  const AnalysisReport report = analyze_game(spec->game);
  fs::create_directories(out);
  write_text_file(out / "analysis.json", analysis_to_json(report).dump(2) + "\n");
  if (!report.assumptions.assumption2_ok) {
    std::cerr << "Assumption2Violated: margin " << report.assumptions.margin << " is not positive\n";
    return kAssumption2;
  }
  if (!report.verdict->feasible) {
    std::cerr << "Assumption3Infeasible: no admissible intervention supports x_opt (residual "
              << report.verdict->residual << ")\n";
    return kAssumption3;
  }
  return kOk;
}

int cmd_simulate(const std::string& scenario_path, const fs::path& out, const Overrides& o) {
  auto loaded = load_or_report(scenario_path);
  if (!loaded) return kBadInput;
  ScenarioSpec spec = apply_overrides(std::move(*loaded), o);
  const CellResult r = run_simulation(spec, out);
  if (r.exit_code != kOk) std::cerr << r.message << "\n";
  return r.exit_code;
}

int cmd_sweep(const std::string& scenario_path, const fs::path& out, const Overrides& o,
              const std::vector<std::string>& protocols, std::size_t seeds, std::size_t jobs) {
  auto loaded = load_or_report(scenario_path);
  if (!loaded) return kBadInput;

  struct Cell {
    std::string protocol;
    std::uint64_t seed;
    fs::path dir;
  };
  std::vector<Cell> cells;
  const std::uint64_t first_seed = o.seed.value_or(0);
  for (const auto& p : protocols) {
    if (!parse_protocol_kind(p)) {
      std::cerr << "error: unknown protocol '" << p << "'\n";
      return kBadInput;
    }
    for (std::size_t s = 0; s < seeds; ++s) {
      const std::uint64_t seed = first_seed + s;
      cells.push_back({p, seed, out / (p + "_seed" + std::to_string(seed))});
    }
  }

  std::vector<CellResult> results(cells.size());
  std::size_t next = 0;
  while (next < cells.size()) {
    std::vector<std::future<void>> batch;
    for (std::size_t j = 0; j < jobs && next < cells.size(); ++j, ++next) {
      batch.push_back(std::async(std::launch::async, [&, i = next] {
        Overrides cell_o = o;
        cell_o.protocol = cells[i].protocol;
        cell_o.seed = cells[i].seed;
        try {
          results[i] = run_simulation(apply_overrides(*loaded, cell_o), cells[i].dir);
        } catch (const std::exception& e) {
          results[i].exit_code = kBadInput;
          results[i].message = e.what();
        }
      }));
    }
    for (auto& f : batch) f.get();
  }

  nlohmann::json index = nlohmann::json::array();
  int worst = kOk;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& r = results[i];
    index.push_back({{"protocol", cells[i].protocol},
                     {"seed", cells[i].seed},
                     {"dir", cells[i].dir.filename().string()},
                     {"exit_code", r.exit_code},
                     {"converged", r.converged},
                     {"final_error", r.final_error},
                     {"lyapunov_violations", r.lyapunov_violations},
                     {"message", r.message}});
    if (r.exit_code == kNotConverged || r.exit_code == kBadInput) worst = std::max(worst, r.exit_code);
  }
  fs::create_directories(out);
  write_text_file(out / "index.json", index.dump(2) + "\n");
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netgame: network games, social optima and regulator interventions"};
  app.require_subcommand(1);
  // "-h" would collide with the step-size option --h.
  app.set_help_flag("--help", "Print this help message and exit");

  std::string scenario;
  std::string out_dir = "out";
  Overrides o;
  std::string protocol;
  double h = 0.0;
  double t_max = 0.0;
  std::uint64_t seed = 0;
  std::size_t stride = 0;
  std::vector<std::string> protocols{"open_loop", "static_feedback", "dynamic", "adaptive"};
  std::size_t seeds = 3;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario, "Scenario JSON file")->required();
    sub->add_option("--out", out_dir, "Output directory");
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--h", h, "Integration step")->check(CLI::PositiveNumber);
    sub->add_option("--t-max", t_max, "Simulation horizon")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for the perturbed initial condition");
    sub->add_option("--stride", stride, "Record every k-th step")->check(CLI::PositiveNumber);
  };

  auto* analyze = app.add_subcommand("analyze", "Check assumptions, compute x_NE, x_opt, u_opt");
  add_common(analyze);

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate the closed loop under one protocol");
  add_common(simulate_cmd);
  add_sim(simulate_cmd);
  simulate_cmd->add_option("--protocol", protocol, "open_loop | static_feedback | dynamic | adaptive");

  auto* sweep = app.add_subcommand("sweep", "Run protocols x seeds, one subdirectory per cell");
  add_common(sweep);
  add_sim(sweep);
  sweep->add_option("--protocols", protocols, "Protocols to sweep")->delimiter(',');
  sweep->add_option("--seeds", seeds, "Number of seeds, starting at --seed")->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", jobs, "Concurrent cells")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kBadInput;
  }

  auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
  CLI::App* active = app.get_subcommands().front();
  if (active != analyze) {
    if (given(active, "--h")) o.h = h;
    if (given(active, "--t-max")) o.t_max = t_max;
    if (given(active, "--seed")) o.seed = seed;
    if (given(active, "--stride")) o.stride = stride;
  }
  if (active == simulate_cmd && given(active, "--protocol")) o.protocol = protocol;

  try {
    if (active == analyze) return cmd_analyze(scenario, out_dir);
    if (active == simulate_cmd) return cmd_simulate(scenario, out_dir, o);
    return cmd_sweep(scenario, out_dir, o, protocols, seeds, jobs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
}
