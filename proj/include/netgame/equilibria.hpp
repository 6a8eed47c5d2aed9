#pragma once

#include <cstddef>
#include <optional>

#include "netgame/game.hpp"

namespace netgame {

inline constexpr double kDefaultViTol = 1e-10;
inline constexpr std::size_t kDefaultViMaxIters = 1'000'000;

/// Affine variational inequality: find x in `set` with
/// (y - x)^T (A x - c) >= 0 for every y in `set`.
///
/// The constructor records the strong-monotonicity modulus mu (smallest
/// eigenvalue of the symmetric part of A) and L = ||A||.
class AffineVi {
 public:
  AffineVi(Matrix A, Vector c, ConstraintSet set);

  const Matrix& A() const { return A_; }
  const Vector& c() const { return c_; }
  const ConstraintSet& set() const { return set_; }
  double mu() const { return mu_; }
  double lipschitz() const { return lipschitz_; }

  /// ||x - proj(x - (A x - c))||, zero exactly at solutions.
  double natural_residual(const Vector& x) const;

 private:
  Matrix A_;
  Vector c_;
  ConstraintSet set_;
  double mu_;
  double lipschitz_;
};

struct ViSolution {
  Vector x;
  double residual = 0.0;
  std::size_t iterations = 0;
};

/// Projection method x <- proj(x - gamma (A x - c)) with gamma = mu / L^2,
/// started from proj(0), stopped once ||x_{k+1} - x_k|| / gamma <= tol.
/// Throws NonMonotone when mu <= 0 and MaxItersExceeded (with the residual
/// in the message) when the budget runs out.
ViSolution solve_affine_vi(const AffineVi& problem, double tol = kDefaultViTol,
                           std::size_t max_iters = kDefaultViMaxIters);

/// x_NE = sol(X, F). Requires Assumption 2.
ViSolution nash_equilibrium(const NetworkGame& game, double tol = kDefaultViTol,
                            std::size_t max_iters = kDefaultViMaxIters);

/// x_opt = sol(X, H). Refuses (Assumption2Violated) when the welfare is not
/// strongly concave, since the maximiser need not be unique then.
ViSolution social_optimum(const NetworkGame& game, double tol = kDefaultViTol,
                          std::size_t max_iters = kDefaultViMaxIters);

/// Whether some admissible u keeps x_opt as the rest point of the players'
/// dynamics, and the minimum-norm such u.
struct FeasibilityVerdict {
  bool feasible = false;
  std::optional<Vector> u_opt;
  /// u_opt - F(x_opt); lies in the normal cone of X at x_opt.
  std::optional<Vector> normal_component;
  /// Distance between the admissible interventions and U (0 when feasible
  /// up to tolerance).
  double residual = 0.0;
};

/// Decomposes u_opt = F(x_opt) + v with v in N_X(x_opt) and intersects the
/// admissible set with U. Requires a box action set.
FeasibilityVerdict optimal_intervention(const NetworkGame& game, const Vector& x_opt,
                                        double tol = 1e-8);

/// welfare(x_opt) - welfare(x_ne)
double welfare_gap(const NetworkGame& game, const Vector& x_ne, const Vector& x_opt);

/// Everything the analysis pipeline learns about a game. Equilibria are
/// absent when Assumption 2 fails.
struct AnalysisReport {
  AssumptionReport assumptions;
  std::optional<Vector> x_ne;
  std::optional<Vector> x_opt;
  std::optional<FeasibilityVerdict> verdict;
  std::optional<double> welfare_gap;
  double ne_residual = 0.0;
  double opt_residual = 0.0;
};

AnalysisReport analyze_game(const NetworkGame& game, double tol = kDefaultViTol);

}  // namespace netgame
