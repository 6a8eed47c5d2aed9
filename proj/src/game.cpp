#include "netgame/game.hpp"

#include <cmath>
#include <string>

#include "netgame/error.hpp"

namespace netgame {

namespace {

void check_vector(const NetworkGame& game, const Vector& x, const char* what) {
  if (static_cast<std::size_t>(x.size()) != game.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(game.size()) + ", got " +
                                                  std::to_string(x.size()));
  }
}

}  // namespace

NetworkGame::NetworkGame(Matrix P, double a, Vector b, ConstraintSet action_set,
                         ConstraintSet intervention_set, Options options)
    : P_(std::move(P)),
      a_(a),
      b_(std::move(b)),
      action_set_(std::move(action_set)),
      intervention_set_(std::move(intervention_set)),
      options_(options) {
  const auto n = b_.size();
  if (n == 0) throw Error(ErrorCode::InvalidGame, "game needs at least one player");
  if (P_.rows() != n || P_.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch,
                "P must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (!std::isfinite(a_) || !b_.allFinite() || !P_.allFinite()) {
    throw Error(ErrorCode::InvalidGame, "game data must be finite");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (P_(i, i) != 0.0) {
      throw Error(ErrorCode::SelfLoopForbidden,
                  "P(" + std::to_string(i) + "," + std::to_string(i) + ") = " +
                      std::to_string(P_(i, i)) + ", the network has no self loops");
    }
    if (options_.allow_weights_outside_unit) continue;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (P_(i, j) < 0.0 || P_(i, j) > 1.0) {
        throw Error(ErrorCode::WeightOutOfRange,
                    "P(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                        std::to_string(P_(i, j)) + " lies outside [0, 1]");
      }
    }
  }
  if (!action_set_.is_box()) {
    throw Error(ErrorCode::UnsupportedActionSet, "action set must be a box of per-player intervals");
  }
  if (action_set_.dim() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::DimensionMismatch, "action set dimension differs from player count");
  }
  if (intervention_set_.dim() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::DimensionMismatch, "intervention set dimension differs from player count");
  }
  if (!contains(intervention_set_, Vector::Zero(n))) {
    throw Error(ErrorCode::InterventionSetExcludesOrigin, "intervention set must contain 0");
  }
}

bool NetworkGame::symmetric() const {
  return (P_ - P_.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol;
}

NetworkGame NetworkGame::with_intervention_set(ConstraintSet u_set) const {
  return NetworkGame(P_, a_, b_, action_set_, std::move(u_set), options_);
}

bool operator==(const NetworkGame& l, const NetworkGame& r) {
  return l.P_ == r.P_ && l.a_ == r.a_ && l.b_ == r.b_ && l.action_set_ == r.action_set_ &&
         l.intervention_set_ == r.intervention_set_ &&
         l.options_.allow_weights_outside_unit == r.options_.allow_weights_outside_unit;
}

Vector neighbor_aggregate(const NetworkGame& game, const Vector& x) {
  check_vector(game, x, "neighbor_aggregate");
  return game.P() * x;
}

double payoff(const NetworkGame& game, std::size_t i, const Vector& x, double u_i) {
  check_vector(game, x, "payoff");
  if (i >= game.size()) {
    throw Error(ErrorCode::DimensionMismatch, "player index " + std::to_string(i) + " out of range");
  }
  const auto k = static_cast<Eigen::Index>(i);
  const double z = game.P().row(k).dot(x);
  const double xi = x[k];
  return -0.5 * xi * xi + xi * (game.a() * z + game.b()[k]) + xi * u_i;
}

double payoff_gradient(const NetworkGame& game, std::size_t i, const Vector& x, double u_i) {
  check_vector(game, x, "payoff_gradient");
  if (i >= game.size()) {
    throw Error(ErrorCode::DimensionMismatch, "player index " + std::to_string(i) + " out of range");
  }
  const auto k = static_cast<Eigen::Index>(i);
  return -x[k] + game.a() * game.P().row(k).dot(x) + game.b()[k] + u_i;
}

double welfare(const NetworkGame& game, const Vector& x) {
  check_vector(game, x, "welfare");
  return -0.5 * x.squaredNorm() + game.a() * x.dot(game.P() * x) + game.b().dot(x);
}

Vector game_map_F(const NetworkGame& game, const Vector& x) {
  check_vector(game, x, "game_map_F");
  return x - game.a() * (game.P() * x) - game.b();
}

Vector welfare_map_H(const NetworkGame& game, const Vector& x) {
  check_vector(game, x, "welfare_map_H");
  return x - game.a() * (game.P() * x + game.P().transpose() * x) - game.b();
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  const Matrix G = M.transpose() * M;
  if (G.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  // Start off-axis so a single zero column cannot stall the iteration.
  Vector v = Vector::Ones(G.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>(i + 1);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = G * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      // Landed in the null space; restart from a coordinate vector.
      v = Vector::Unit(G.cols(), it % G.cols());
      continue;
    }
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

AssumptionReport check_assumptions(const NetworkGame& game) {
  AssumptionReport r;
  const auto n = static_cast<Eigen::Index>(game.size());
  r.assumption1_ok = contains(game.intervention_set(), Vector::Zero(n));
  r.symmetric = game.symmetric();

  const Matrix S = game.P() + game.P().transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(S, Eigen::EigenvaluesOnly);
  r.lambda_min_PPt = eig.eigenvalues().minCoeff();
  r.lambda_max_PPt = eig.eigenvalues().maxCoeff();

  const double a = game.a();
  r.zero_coupling = (a == 0.0);
  const double extreme = a > 0.0 ? r.lambda_max_PPt : r.lambda_min_PPt;
  r.margin = 1.0 - a * extreme;
  r.assumption2_ok = r.margin > 0.0;

  r.aP_spectral_norm = spectral_norm(a * game.P());
  r.weak_coupling_ok = r.aP_spectral_norm < 0.5;
  return r;
}

}  // namespace netgame
