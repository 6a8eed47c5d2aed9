#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "netgame/game.hpp"
#include "netgame/protocols.hpp"

namespace netgame {

struct SimConfig {
  double h = 1e-3;
  double t_max = 100.0;
  double conv_tol = 1e-6;
  std::size_t record_stride = 10;
  /// A Lyapunov increase larger than lyapunov_slack * h between consecutive
  /// steps counts as a violation.
  double lyapunov_slack = 1e-6;
  /// Any state norm above this aborts the run with Divergence.
  double bound_ceiling = 1e6;

  /// Throws InvalidConfig when a field is out of range.
  void validate() const;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Harness-side knowledge used only for monitoring. Controllers never see it.
struct LyapunovReference {
  std::optional<Vector> x_opt;
  /// Steady intervention for the dynamic protocol's target.
  std::optional<Vector> u_s;
  /// True network matrix aP, for the adaptive parameter error K - aP.
  std::optional<Matrix> aP;
};

/// Largest norms reached by each signal over a run.
struct PeakNorms {
  double x = 0.0;
  double u = 0.0;
  double z = 0.0;
  double w = 0.0;
  double K = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> x_states;
  std::vector<Vector> u_values;
  std::vector<double> lyapunov;
  std::vector<double> vi_residuals;
  bool converged = false;
  std::optional<double> t_converged;
  /// Violations counted at every integration step, not just recorded ones.
  std::size_t step_lyapunov_violations = 0;
  std::size_t steps = 0;
  PeakNorms peaks;
  std::vector<std::string> warnings;
  /// Controller memory at the end of the run.
  std::optional<ProtocolState> final_state;

  std::size_t size() const { return times.size(); }
};

struct StepResult {
  Vector x_next;
  ProtocolState state_next;
};

/// One projected explicit Euler step of the closed loop:
///   u      = protocol_output(state, x)
///   x_next = proj_X(x + h (-F(x) + u))
/// Dynamic:  u_next = proj_U(u + h (x_s - x_next)).
/// Adaptive: z and w take explicit Euler steps; K takes its step with the
/// error measured after the players and observer moved, e_next x^T.
/// Throws Divergence on a non-finite state.
StepResult step(const NetworkGame& game, const ProtocolState& state, const Vector& x, double h);

/// Lyapunov function certifying each protocol:
///   open_loop, static_feedback: |x - x_opt|^2 / 2
///   dynamic:                    |x - x_s|^2 / 2 + |u - u_s|^2 / 2
///   adaptive:                   |e|^2 / 2 + |K - aP|_F^2 / 2
/// Throws MissingReference when `refs` lacks what the kind needs.
double lyapunov_value(ProtocolKind kind, const NetworkGame& game, const Vector& x,
                      const ProtocolState& state, const LyapunovReference& refs);

/// Integrates from x0 until |x - x_target| <= conv_tol or t_max. x0 outside
/// X is projected in and a warning recorded. Records every record_stride
/// steps plus the final state.
Trajectory simulate(const NetworkGame& game, ProtocolState state, const Vector& x0,
                    const SimConfig& config, const Vector& x_target,
                    const LyapunovReference& refs);

struct ConvergenceMetrics {
  double final_error = 0.0;
  std::optional<double> t_to_tol;
  std::size_t lyapunov_violations = 0;
};

/// Summary over the recorded samples of a trajectory.
ConvergenceMetrics convergence_metrics(const Trajectory& traj, const Vector& x_target,
                                       double conv_tol, double h, double lyapunov_slack);

}  // namespace netgame
