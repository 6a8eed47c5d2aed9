#include "netgame/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "netgame/error.hpp"

namespace netgame {

AffineVi::AffineVi(Matrix A, Vector c, ConstraintSet set)
    : A_(std::move(A)), c_(std::move(c)), set_(std::move(set)) {
  const auto n = c_.size();
  if (A_.rows() != n || A_.cols() != n || set_.dim() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::DimensionMismatch, "affine VI data have inconsistent dimensions");
  }
  const Matrix sym = 0.5 * (A_ + A_.transpose());
  mu_ = Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  lipschitz_ = spectral_norm(A_);
}

double AffineVi::natural_residual(const Vector& x) const {
  return (x - project(set_, x - (A_ * x - c_))).norm();
}

ViSolution solve_affine_vi(const AffineVi& problem, double tol, std::size_t max_iters) {
  if (!(problem.mu() > 0.0)) {
    std::ostringstream msg;
    msg << "symmetric part of A has smallest eigenvalue " << problem.mu();
    throw Error(ErrorCode::NonMonotone, msg.str());
  }
  const double gamma = problem.mu() / (problem.lipschitz() * problem.lipschitz());
  const auto n = problem.c().size();

  ViSolution sol;
  Vector x = project(problem.set(), Vector::Zero(n));
  for (std::size_t k = 0; k < max_iters; ++k) {
    Vector next = project(problem.set(), x - gamma * (problem.A() * x - problem.c()));
    const double step = (next - x).norm() / gamma;
    x = std::move(next);
    if (step <= tol) {
      // The unit-step residual can lag the scaled step when gamma > 1.
      const double r = problem.natural_residual(x);
      if (r <= 10.0 * tol) {
        sol.x = std::move(x);
        sol.residual = r;
        sol.iterations = k + 1;
        return sol;
      }
    }
  }
  std::ostringstream msg;
  msg << "projection method stopped after " << max_iters
      << " iterations with natural residual " << problem.natural_residual(x);
  throw Error(ErrorCode::MaxItersExceeded, msg.str());
}

namespace {

void require_assumption2(const NetworkGame& game, const char* what) {
  const auto report = check_assumptions(game);
  if (!report.assumption2_ok) {
    std::ostringstream msg;
    msg << what << ": margin 1 - max a*lambda(P+P^T) = " << report.margin << " is not positive";
    throw Error(ErrorCode::Assumption2Violated, msg.str());
  }
}

}  // namespace

ViSolution nash_equilibrium(const NetworkGame& game, double tol, std::size_t max_iters) {
  require_assumption2(game, "nash_equilibrium");
  const auto n = static_cast<Eigen::Index>(game.size());
  AffineVi vi(Matrix::Identity(n, n) - game.a() * game.P(), game.b(), game.action_set());
  return solve_affine_vi(vi, tol, max_iters);
}

ViSolution social_optimum(const NetworkGame& game, double tol, std::size_t max_iters) {
  require_assumption2(game, "social_optimum");
  const auto n = static_cast<Eigen::Index>(game.size());
  AffineVi vi(Matrix::Identity(n, n) - game.a() * (game.P() + game.P().transpose()), game.b(),
              game.action_set());
  return solve_affine_vi(vi, tol, max_iters);
}

FeasibilityVerdict optimal_intervention(const NetworkGame& game, const Vector& x_opt, double tol) {
  const Box* box = game.action_set().as_box();
  if (box == nullptr) {
    throw Error(ErrorCode::UnsupportedActionSet, "optimal_intervention needs a box action set");
  }
  if (!contains(game.action_set(), x_opt, kMembershipTol)) {
    throw Error(ErrorCode::NotInSet, "optimal_intervention: x_opt lies outside the action set");
  }
  const Vector f = game_map_F(game, x_opt);
  const auto n = f.size();

  // Admissible u_i form the interval f_i + N_i, where N_i is the normal cone
  // of the i-th action interval at x_opt_i.
  Vector adm_lo(n), adm_hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& iv = box->intervals[static_cast<std::size_t>(i)];
    const bool at_lo = iv.bounded_below() && std::abs(x_opt[i] - iv.lo) <= kActiveBoundTol;
    const bool at_hi = iv.bounded_above() && std::abs(x_opt[i] - iv.hi) <= kActiveBoundTol;
    adm_lo[i] = at_lo ? -kInf : f[i];
    adm_hi[i] = at_hi ? kInf : f[i];
  }

  FeasibilityVerdict verdict;
  Vector u(n);
  const ConstraintSet& u_set = game.intervention_set();
  if (const Box* ubox = u_set.as_box()) {
    double gap2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& uiv = ubox->intervals[static_cast<std::size_t>(i)];
      const double lo = std::max(adm_lo[i], uiv.lo);
      const double hi = std::min(adm_hi[i], uiv.hi);
      if (lo <= hi) {
        u[i] = std::clamp(0.0, lo, hi);
      } else {
        gap2 += (lo - hi) * (lo - hi);
        // Point of U_i nearest to the admissible interval.
        u[i] = adm_lo[i] > uiv.hi ? uiv.hi : uiv.lo;
      }
    }
    verdict.residual = std::sqrt(gap2);
  } else {
    // Box X makes the cone separable, so the coordinatewise shrink toward 0
    // gives the minimum-norm admissible point. Ball and subspace membership
    // are both decided by that point alone: a ball is a norm sublevel set,
    // and a pinned coordinate can be zero only if 0 is admissible there,
    // which the shrink already selects.
    for (Eigen::Index i = 0; i < n; ++i) u[i] = std::clamp(0.0, adm_lo[i], adm_hi[i]);
    verdict.residual = distance(u_set, u);
    u = project(u_set, u);
  }

  verdict.feasible = verdict.residual <= tol;
  if (verdict.feasible) {
    verdict.normal_component = u - f;
    verdict.u_opt = std::move(u);
  }
  return verdict;
}

double welfare_gap(const NetworkGame& game, const Vector& x_ne, const Vector& x_opt) {
  return welfare(game, x_opt) - welfare(game, x_ne);
}

AnalysisReport analyze_game(const NetworkGame& game, double tol) {
  AnalysisReport report;
  report.assumptions = check_assumptions(game);
  if (!report.assumptions.assumption2_ok) return report;

  auto ne = nash_equilibrium(game, tol);
  auto opt = social_optimum(game, tol);
  report.ne_residual = ne.residual;
  report.opt_residual = opt.residual;
  report.verdict = optimal_intervention(game, opt.x);
  report.welfare_gap = welfare_gap(game, ne.x, opt.x);
  report.x_ne = std::move(ne.x);
  report.x_opt = std::move(opt.x);
  return report;
}

}  // namespace netgame
