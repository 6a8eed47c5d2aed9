#include "netgame/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "netgame/error.hpp"

namespace netgame {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void guard_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::Divergence, std::string(what) + " became non-finite");
  }
}

void update_peaks(PeakNorms& peaks, const Vector& x, const Vector& u, const ProtocolState& state) {
  peaks.x = std::max(peaks.x, x.norm());
  peaks.u = std::max(peaks.u, u.norm());
  if (const auto* s = std::get_if<AdaptiveState>(&state)) {
    peaks.z = std::max(peaks.z, s->z.norm());
    peaks.w = std::max(peaks.w, s->w.norm());
    peaks.K = std::max(peaks.K, s->K.norm());
  }
}

double largest(const PeakNorms& p) { return std::max({p.x, p.u, p.z, p.w, p.K}); }

double vi_residual(const NetworkGame& game, const Vector& x, const Vector& u) {
  return (x - project(game.action_set(), x - (game_map_F(game, x) - u))).norm();
}

}  // namespace

void SimConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(h > 0.0) || !std::isfinite(h)) fail("h must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) fail("t_max must be positive");
  if (!(conv_tol > 0.0)) fail("conv_tol must be positive");
  if (record_stride < 1) fail("record_stride must be at least 1");
  if (!(lyapunov_slack >= 0.0)) fail("lyapunov_slack must be nonnegative");
  if (!(bound_ceiling > 0.0)) fail("bound_ceiling must be positive");
}

StepResult step(const NetworkGame& game, const ProtocolState& state, const Vector& x, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidConfig, "step size must be positive");
  const Vector u = protocol_output(state, x);
  Vector x_next = project(game.action_set(), x + h * (u - game_map_F(game, x)));
  guard_finite(x_next, "action profile");

  ProtocolState next = std::visit(
      overloaded{
          [](const OpenLoopState& s) -> ProtocolState { return s; },
          [](const StaticFeedbackState& s) -> ProtocolState { return s; },
          [&](const DynamicState& s) -> ProtocolState {
            // The integrator reads the players' new actions. With the old
            // ones the skew coupling between x and u gains energy at rate
            // h^2 (|x - x_s|^2 + |u - u_s|^2) / 2 per step.
            DynamicState d = s;
            d.u = project(s.u_set, s.u + h * (s.x_s - x_next));
            guard_finite(d.u, "integrator state");
            return d;
          },
          [&](const AdaptiveState& s) -> ProtocolState {
            const double xx = x.squaredNorm();
            AdaptiveState d = s;
            d.z = s.z + h * (-s.z + s.K * x + s.b + u);
            d.w = s.w + h * (-s.w + s.error(x) * xx);
            // Gain update uses the error after the players and the observer
            // have moved. Plain Euler with the stale error lets |e|^2/2 +
            // |K - aP|_F^2/2 grow by h^2 |(K - aP) x|^2 / 2 per step.
            const Vector e_next = x_next - d.z - d.w;
            d.K = s.K + h * e_next * x.transpose();
            guard_finite(d.z, "observer state");
            guard_finite(d.w, "filter state");
            if (!d.K.allFinite()) throw Error(ErrorCode::Divergence, "adaptive gain became non-finite");
            return d;
          },
      },
      state);
  return StepResult{std::move(x_next), std::move(next)};
}

double lyapunov_value(ProtocolKind kind, const NetworkGame& game, const Vector& x,
                      const ProtocolState& state, const LyapunovReference& refs) {
  auto need = [](bool present, const char* what) {
    if (!present) throw Error(ErrorCode::MissingReference, what);
  };
  switch (kind) {
    case ProtocolKind::OpenLoop:
    case ProtocolKind::StaticFeedback:
      need(refs.x_opt.has_value(), "x_opt is required for this Lyapunov function");
      return 0.5 * (x - *refs.x_opt).squaredNorm();
    case ProtocolKind::Dynamic: {
      const auto* s = std::get_if<DynamicState>(&state);
      need(s != nullptr, "dynamic Lyapunov function needs a dynamic protocol state");
      need(refs.u_s.has_value(), "u_s is required for the dynamic Lyapunov function");
      return 0.5 * (x - s->x_s).squaredNorm() + 0.5 * (s->u - *refs.u_s).squaredNorm();
    }
    case ProtocolKind::Adaptive: {
      const auto* s = std::get_if<AdaptiveState>(&state);
      need(s != nullptr, "adaptive Lyapunov function needs an adaptive protocol state");
      need(refs.aP.has_value(), "aP is required for the adaptive Lyapunov function");
      return 0.5 * s->error(x).squaredNorm() + 0.5 * (s->K - *refs.aP).squaredNorm();
    }
  }
  (void)game;
  throw Error(ErrorCode::InvalidConfig, "unknown protocol kind");
}

Trajectory simulate(const NetworkGame& game, ProtocolState state, const Vector& x0,
                    const SimConfig& config, const Vector& x_target,
                    const LyapunovReference& refs) {
  config.validate();
  if (static_cast<std::size_t>(x0.size()) != game.size() ||
      static_cast<std::size_t>(x_target.size()) != game.size()) {
    throw Error(ErrorCode::DimensionMismatch, "simulate: x0 and x_target must have dimension n");
  }
  const ProtocolKind kind = kind_of(state);

  Trajectory traj;
  Vector x = x0;
  if (!contains(game.action_set(), x0)) {
    x = project(game.action_set(), x0);
    std::ostringstream msg;
    msg << "x0 was " << distance(game.action_set(), x0) << " outside the action set; projected";
    traj.warnings.push_back(msg.str());
  }

  auto record = [&](double t, const Vector& xk, const Vector& uk, double v) {
    traj.times.push_back(t);
    traj.x_states.push_back(xk);
    traj.u_values.push_back(uk);
    traj.lyapunov.push_back(v);
    traj.vi_residuals.push_back(vi_residual(game, xk, uk));
  };

  Vector u = protocol_output(state, x);
  double v = lyapunov_value(kind, game, x, state, refs);
  update_peaks(traj.peaks, x, u, state);
  record(0.0, x, u, v);

  if ((x - x_target).norm() <= config.conv_tol) {
    traj.converged = true;
    traj.t_converged = 0.0;
    traj.final_state = std::move(state);
    return traj;
  }

  const auto total_steps = static_cast<std::size_t>(std::ceil(config.t_max / config.h - 1e-9));
  const double allowed_rise = config.lyapunov_slack * config.h;
  for (std::size_t k = 1; k <= total_steps; ++k) {
    StepResult next = step(game, state, x, config.h);
    x = std::move(next.x_next);
    state = std::move(next.state_next);
    u = protocol_output(state, x);
    const double v_next = lyapunov_value(kind, game, x, state, refs);
    if (v_next > v + allowed_rise) ++traj.step_lyapunov_violations;
    v = v_next;
    traj.steps = k;

    update_peaks(traj.peaks, x, u, state);
    if (largest(traj.peaks) > config.bound_ceiling) {
      std::ostringstream msg;
      msg << "state norm exceeded the ceiling " << config.bound_ceiling << " at t = "
          << static_cast<double>(k) * config.h;
      throw Error(ErrorCode::Divergence, msg.str());
    }

    const double t = static_cast<double>(k) * config.h;
    const bool done = (x - x_target).norm() <= config.conv_tol;
    if (k % config.record_stride == 0 || done || k == total_steps) record(t, x, u, v);
    if (done) {
      traj.converged = true;
      traj.t_converged = t;
      break;
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

ConvergenceMetrics convergence_metrics(const Trajectory& traj, const Vector& x_target,
                                       double conv_tol, double h, double lyapunov_slack) {
  ConvergenceMetrics m;
  if (traj.size() == 0) return m;
  m.final_error = (traj.x_states.back() - x_target).norm();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    if ((traj.x_states[k] - x_target).norm() <= conv_tol) {
      m.t_to_tol = traj.times[k];
      break;
    }
  }
  for (std::size_t k = 0; k + 1 < traj.lyapunov.size(); ++k) {
    if (traj.lyapunov[k + 1] > traj.lyapunov[k] + lyapunov_slack * h) ++m.lyapunov_violations;
  }
  return m;
}

}  // namespace netgame
