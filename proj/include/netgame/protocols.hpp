#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "netgame/game.hpp"

namespace netgame {

enum class ProtocolKind { OpenLoop, StaticFeedback, Dynamic, Adaptive };

std::string_view to_string(ProtocolKind kind);
/// Accepts "open_loop", "static_feedback", "dynamic", "adaptive".
std::optional<ProtocolKind> parse_protocol_kind(std::string_view name);

/// Constant intervention u = u_opt.
struct OpenLoopState {
  Vector u_opt;
};

/// u = proj_U(aP^T x). Holds only aP^T and U: the regulator knows neither b
/// nor the action sets.
struct StaticFeedbackState {
  Matrix aP_transpose;
  ConstraintSet u_set;
};

/// Projected integrator du/dt = Pi_U(u, x_s - x) around a target x_s.
struct DynamicState {
  Vector u;
  Vector x_s;
  ConstraintSet u_set;
};

/// Adaptive gain u = K x driven by an observer z, a filter w and the error
/// e = x - z - w. Knows b and nothing else about the game.
struct AdaptiveState {
  Vector z;
  Vector w;
  Matrix K;
  Vector b;

  Vector error(const Vector& x) const { return x - z - w; }
};

using ProtocolState = std::variant<OpenLoopState, StaticFeedbackState, DynamicState, AdaptiveState>;

ProtocolKind kind_of(const ProtocolState& state);

struct ProtocolOptions {
  /// Target for the dynamic protocol.
  std::optional<Vector> x_s;
  /// Dynamic protocol only: trust x_s without checking it is assignable
  /// (the regulator genuinely lacks game data).
  bool skip_target_check = false;
  /// Initial action profile; seeds the adaptive observer z(0) = x(0).
  std::optional<Vector> x0;
  /// Social optimum if the caller already computed it.
  std::optional<Vector> x_opt;
};

/// Validates the kind-specific premises and returns the initial controller
/// state. Every violated premise raises a distinct ErrorCode:
///   open_loop        Assumption2Violated, Assumption3Infeasible
///   static_feedback  WeakCouplingViolated, FeedbackTargetOutsideInterventionSet
///                    (skipped when U is the whole space), Assumption2Violated
///   dynamic          MissingTarget, NotInSet, TargetNotAssignable
///   adaptive         AsymmetricNetwork, ConstrainedAdaptive
ProtocolState make_protocol(ProtocolKind kind, const NetworkGame& game,
                            const ProtocolOptions& options = {});

/// Intervention applied at action profile x.
Vector protocol_output(const ProtocolState& state, const Vector& x);

struct NoDerivative {};
struct DynamicDerivative {
  Vector du;
};
struct AdaptiveDerivative {
  Vector dz;
  Vector dw;
  Matrix dK;
};
using ProtocolDerivative = std::variant<NoDerivative, DynamicDerivative, AdaptiveDerivative>;

/// Time derivative of the controller memory at action profile x.
/// Memoryless protocols return NoDerivative.
ProtocolDerivative protocol_rhs(const ProtocolState& state, const Vector& x);

}  // namespace netgame
