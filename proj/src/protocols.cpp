#include "netgame/protocols.hpp"

#include <sstream>

#include "netgame/equilibria.hpp"
#include "netgame/error.hpp"

namespace netgame {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_dim(std::size_t expected, const Vector& x, const char* what) {
  if (static_cast<std::size_t>(x.size()) != expected) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(expected) + ", got " +
                                                  std::to_string(x.size()));
  }
}

std::size_t state_dim(const ProtocolState& state) {
  return std::visit(overloaded{
                        [](const OpenLoopState& s) { return static_cast<std::size_t>(s.u_opt.size()); },
                        [](const StaticFeedbackState& s) { return s.u_set.dim(); },
                        [](const DynamicState& s) { return s.u_set.dim(); },
                        [](const AdaptiveState& s) { return static_cast<std::size_t>(s.b.size()); },
                    },
                    state);
}

Vector x_opt_for(const NetworkGame& game, const ProtocolOptions& options) {
  if (options.x_opt) return *options.x_opt;
  return social_optimum(game).x;
}

void require_assumption2(const NetworkGame& game) {
  const auto report = check_assumptions(game);
  if (!report.assumption2_ok) {
    std::ostringstream msg;
    msg << "margin " << report.margin << " is not positive";
    throw Error(ErrorCode::Assumption2Violated, msg.str());
  }
}

ProtocolState make_open_loop(const NetworkGame& game, const ProtocolOptions& options) {
  require_assumption2(game);
  const auto verdict = optimal_intervention(game, x_opt_for(game, options));
  if (!verdict.feasible) {
    std::ostringstream msg;
    msg << "no admissible intervention keeps the social optimum at rest (residual "
        << verdict.residual << ")";
    throw Error(ErrorCode::Assumption3Infeasible, msg.str());
  }
  return OpenLoopState{*verdict.u_opt};
}

ProtocolState make_static_feedback(const NetworkGame& game, const ProtocolOptions& options) {
  const Matrix aPt = game.a() * game.P().transpose();
  const ConstraintSet& u_set = game.intervention_set();
  if (!u_set.is_whole_space()) {
    const auto report = check_assumptions(game);
    if (!report.weak_coupling_ok) {
      std::ostringstream msg;
      msg << "||aP|| = " << report.aP_spectral_norm
          << " is not below 1/2 and the intervention set is constrained";
      throw Error(ErrorCode::WeakCouplingViolated, msg.str());
    }
    require_assumption2(game);
    const Vector target = aPt * x_opt_for(game, options);
    const double d = distance(u_set, target);
    if (d > kMembershipTol) {
      std::ostringstream msg;
      msg << "aP^T x_opt lies " << d << " outside the intervention set";
      throw Error(ErrorCode::FeedbackTargetOutsideInterventionSet, msg.str());
    }
  } else {
    require_assumption2(game);
  }
  return StaticFeedbackState{aPt, u_set};
}

ProtocolState make_dynamic(const NetworkGame& game, const ProtocolOptions& options) {
  if (!options.x_s) throw Error(ErrorCode::MissingTarget, "dynamic protocol needs a target x_s");
  const Vector& x_s = *options.x_s;
  check_dim(game.size(), x_s, "make_protocol(dynamic)");
  if (!options.skip_target_check) {
    require_assumption2(game);
    if (!contains(game.action_set(), x_s, kMembershipTol)) {
      throw Error(ErrorCode::NotInSet, "target x_s lies outside the action set");
    }
    const auto verdict = optimal_intervention(game, x_s);
    if (!verdict.feasible) {
      std::ostringstream msg;
      msg << "x_s is not an assignable equilibrium (residual " << verdict.residual << ")";
      throw Error(ErrorCode::TargetNotAssignable, msg.str());
    }
  }
  const auto n = static_cast<Eigen::Index>(game.size());
  return DynamicState{Vector::Zero(n), x_s, game.intervention_set()};
}

ProtocolState make_adaptive(const NetworkGame& game, const ProtocolOptions& options) {
  if (!game.symmetric()) {
    throw Error(ErrorCode::AsymmetricNetwork, "adaptive protocol requires P = P^T");
  }
  if (!game.action_set().is_whole_space() || !game.intervention_set().is_whole_space()) {
    throw Error(ErrorCode::ConstrainedAdaptive,
                "adaptive protocol requires unconstrained actions and interventions");
  }
  const auto n = static_cast<Eigen::Index>(game.size());
  Vector x0 = Vector::Zero(n);
  if (options.x0) {
    check_dim(game.size(), *options.x0, "make_protocol(adaptive)");
    x0 = *options.x0;
  }
  // z(0) = x(0), w(0) = 0, K(0) = 0, so the error starts at zero and the
  // gain starts from the uncontrolled game.
  return AdaptiveState{x0, Vector::Zero(n), Matrix::Zero(n, n), game.b()};
}

}  // namespace

std::string_view to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::OpenLoop: return "open_loop";
    case ProtocolKind::StaticFeedback: return "static_feedback";
    case ProtocolKind::Dynamic: return "dynamic";
    case ProtocolKind::Adaptive: return "adaptive";
  }
  return "unknown";
}

std::optional<ProtocolKind> parse_protocol_kind(std::string_view name) {
  for (auto k : {ProtocolKind::OpenLoop, ProtocolKind::StaticFeedback, ProtocolKind::Dynamic,
                 ProtocolKind::Adaptive}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

ProtocolKind kind_of(const ProtocolState& state) {
  return std::visit(overloaded{
                        [](const OpenLoopState&) { return ProtocolKind::OpenLoop; },
                        [](const StaticFeedbackState&) { return ProtocolKind::StaticFeedback; },
                        [](const DynamicState&) { return ProtocolKind::Dynamic; },
                        [](const AdaptiveState&) { return ProtocolKind::Adaptive; },
                    },
                    state);
}

ProtocolState make_protocol(ProtocolKind kind, const NetworkGame& game,
                            const ProtocolOptions& options) {
  switch (kind) {
    case ProtocolKind::OpenLoop: return make_open_loop(game, options);
    case ProtocolKind::StaticFeedback: return make_static_feedback(game, options);
    case ProtocolKind::Dynamic: return make_dynamic(game, options);
    case ProtocolKind::Adaptive: return make_adaptive(game, options);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown protocol kind");
}

Vector protocol_output(const ProtocolState& state, const Vector& x) {
  check_dim(state_dim(state), x, "protocol_output");
  return std::visit(overloaded{
                        [](const OpenLoopState& s) { return Vector(s.u_opt); },
                        [&](const StaticFeedbackState& s) {
                          return project(s.u_set, s.aP_transpose * x);
                        },
                        [](const DynamicState& s) { return Vector(s.u); },
                        [&](const AdaptiveState& s) { return Vector(s.K * x); },
                    },
                    state);
}

ProtocolDerivative protocol_rhs(const ProtocolState& state, const Vector& x) {
  check_dim(state_dim(state), x, "protocol_rhs");
  return std::visit(
      overloaded{
          [](const OpenLoopState&) -> ProtocolDerivative { return NoDerivative{}; },
          [](const StaticFeedbackState&) -> ProtocolDerivative { return NoDerivative{}; },
          [&](const DynamicState& s) -> ProtocolDerivative {
            return DynamicDerivative{project_tangent(s.u_set, s.u, s.x_s - x)};
          },
          [&](const AdaptiveState& s) -> ProtocolDerivative {
            const Vector u = s.K * x;
            const Vector e = s.error(x);
            AdaptiveDerivative d;
            d.dz = -s.z + s.K * x + s.b + u;
            d.dw = -s.w + e * x.squaredNorm();
            d.dK = e * x.transpose();
            return d;
          },
      },
      state);
}

}  // namespace netgame
