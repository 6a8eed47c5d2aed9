#pragma once

#include <cstddef>

#include "netgame/sets.hpp"

namespace netgame {

/// Absolute tolerance for deciding P == P^T.
inline constexpr double kSymmetryTol = 1e-12;

struct GameOptions {
  /// Skip the P_ij in [0, 1] check; nothing in the analysis needs it.
  bool allow_weights_outside_unit = false;
};

/// Linear-quadratic network game.
///
/// Player i chooses x_i in an interval and receives
///   U_i = -x_i^2 / 2 + x_i (a z_i + b_i) + x_i u_i,   z_i = sum_j P_ij x_j,
/// where u is the regulator's intervention, drawn from `intervention_set`.
///
/// Construction enforces a hollow P with entries in [0, 1] (the range check
/// can be lifted through Options), a box-shaped action set of dimension n,
/// and an intervention set of dimension n that contains the origin.
class NetworkGame {
 public:
  using Options = GameOptions;

  NetworkGame(Matrix P, double a, Vector b, ConstraintSet action_set,
              ConstraintSet intervention_set, Options options = {});

  std::size_t size() const { return static_cast<std::size_t>(b_.size()); }
  const Matrix& P() const { return P_; }
  double a() const { return a_; }
  const Vector& b() const { return b_; }
  const ConstraintSet& action_set() const { return action_set_; }
  const ConstraintSet& intervention_set() const { return intervention_set_; }
  const Options& options() const { return options_; }

  bool symmetric() const;

  /// The same game with a different intervention set.
  NetworkGame with_intervention_set(ConstraintSet u_set) const;

  friend bool operator==(const NetworkGame&, const NetworkGame&);

 private:
  Matrix P_;
  double a_;
  Vector b_;
  ConstraintSet action_set_;
  ConstraintSet intervention_set_;
  Options options_;
};

struct AssumptionReport {
  bool assumption1_ok = false;
  bool symmetric = false;
  double lambda_min_PPt = 0.0;
  double lambda_max_PPt = 0.0;
  /// 1 - max_i a * lambda_i(P + P^T)
  double margin = 0.0;
  double aP_spectral_norm = 0.0;
  bool assumption2_ok = false;
  /// ||aP|| < 1/2
  bool weak_coupling_ok = false;
  /// a == 0: the game decouples; formulas stay valid but the model excludes it.
  bool zero_coupling = false;
};

/// z_i = sum_j P_ij x_j
Vector neighbor_aggregate(const NetworkGame& game, const Vector& x);

/// U_i(x_i, z_i(x), u_i) for player index i (0-based).
double payoff(const NetworkGame& game, std::size_t i, const Vector& x, double u_i);

/// d U_i / d x_i = -x_i + a z_i + b_i + u_i
double payoff_gradient(const NetworkGame& game, std::size_t i, const Vector& x, double u_i);

/// Sum of payoffs without intervention: -x'x/2 + a x'Px + b'x.
double welfare(const NetworkGame& game, const Vector& x);

/// F(x) = (I - aP) x - b; the Nash equilibrium solves VI(X, F).
Vector game_map_F(const NetworkGame& game, const Vector& x);

/// H(x) = (I - a(P + P^T)) x - b = -grad welfare; the social optimum solves VI(X, H).
Vector welfare_map_H(const NetworkGame& game, const Vector& x);

/// Largest singular value by power iteration on M^T M
/// (relative tolerance 1e-12, at most 10000 iterations).
double spectral_norm(const Matrix& M);

/// Spectral checks behind existence/uniqueness of the social optimum and the
/// weak-coupling premise of static feedback. Never throws for a valid game.
AssumptionReport check_assumptions(const NetworkGame& game);

}  // namespace netgame
