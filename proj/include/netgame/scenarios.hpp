#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "netgame/equilibria.hpp"
#include "netgame/game.hpp"
#include "netgame/protocols.hpp"
#include "netgame/sim.hpp"

namespace netgame {

/// Cournot competition with differentiated goods. Firm i sells x_i at price
///   p_i(x) = alpha_i - (x_i + 2 beta sum_{j != i} P_ij x_j) / 2
/// and pays marginal cost d_i.
struct CournotParams {
  Vector alpha;
  Vector d;
  double beta = 0.0;
  Matrix P;
  ConstraintSet action_set = ConstraintSet::full(0);
  ConstraintSet intervention_set = ConstraintSet::full(0);
};

/// a = -beta, b = alpha - d, same network and sets.
NetworkGame cournot_to_game(const CournotParams& params);

double cournot_price(const CournotParams& params, std::size_t i, const Vector& x);

/// x_i p_i(x) - x_i d_i + x_i u_i
double cournot_profit(const CournotParams& params, std::size_t i, const Vector& x, double u_i);

struct RandomGameOptions {
  std::size_t n = 10;
  /// Probability that an off-diagonal edge is present.
  double density = 0.5;
  /// Sign of the coupling a (+1 or -1).
  int a_sign = 1;
  /// Target value of 1 - a * lambda_extreme(P + P^T), in (0, 1).
  double margin = 0.3;
  std::uint64_t seed = 0;
  bool symmetric = false;
  double b_lo = -1.0;
  double b_hi = 2.0;
  /// Defaults: unbounded box actions, unconstrained interventions.
  std::optional<ConstraintSet> action_set;
  std::optional<ConstraintSet> intervention_set;
};

/// Random game with edge weights uniform in (0, 1] and a scaled so the
/// Assumption-2 margin equals `margin` exactly. Deterministic in the seed.
/// Throws DegenerateNetwork if 100 draws all produce an empty network.
NetworkGame random_game(const RandomGameOptions& options);
NetworkGame random_game(std::size_t n, double density, int a_sign, double margin,
                        std::uint64_t seed);

/// Everything needed to reproduce one run.
struct ScenarioSpec {
  std::string label;
  NetworkGame game;
  ProtocolKind protocol = ProtocolKind::OpenLoop;
  std::optional<Vector> x_s;
  bool skip_target_check = false;
  SimConfig sim;
  Vector x0;
  /// Frozen social optimum kept as regression data, if the file has one.
  std::optional<Vector> x_opt_reference;

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&);
};

nlohmann::json set_to_json(const ConstraintSet& set);
/// `dim` sizes the ball/subspace/box variants whose records omit it.
ConstraintSet set_from_json(const nlohmann::json& j, std::size_t dim, const std::string& field);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
/// Throws ParseError naming the offending field; constructor invariants
/// (SelfLoopForbidden, ...) surface with their own codes.
ScenarioSpec scenario_from_json(const nlohmann::json& j);

ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

nlohmann::json analysis_to_json(const AnalysisReport& report);

/// Header t, x_1..x_n, u_1..u_n, V, residual.
std::string trajectory_csv(const Trajectory& traj);

nlohmann::json summary_to_json(const Trajectory& traj, const ConvergenceMetrics& metrics);

/// Writes trajectory.csv, summary.json and analysis.json into `dir`.
void save_results(const Trajectory& traj, const ConvergenceMetrics& metrics,
                  const AnalysisReport& report, const std::filesystem::path& dir);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

}  // namespace netgame
