#pragma once

// Reference computations that share no code with the library: dense linear
// solves, brute-force grids and finite differences.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Vector dense_solve(const Matrix& A, const Vector& c) { return A.fullPivLu().solve(c); }

inline Matrix g2_P() {
  Matrix P(2, 2);
  P << 0, 1, 1, 0;
  return P;
}

/// Term-by-term sum of the uncompensated payoffs.
inline double welfare_sum(const Matrix& P, double a, const Vector& b, const Vector& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double z = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) z += P(i, j) * x[j];
    total += -0.5 * x[i] * x[i] + x[i] * (a * z + b[i]);
  }
  return total;
}

inline double payoff_i(const Matrix& P, double a, const Vector& b, Eigen::Index i, const Vector& x,
                       double u_i) {
  double z = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) z += P(i, j) * x[j];
  return -0.5 * x[i] * x[i] + x[i] * (a * z + b[i]) + x[i] * u_i;
}

struct Grid2 {
  double lo[2];
  double hi[2];
  int points;
  double pitch(int k) const { return (hi[k] - lo[k]) / (points - 1); }
  double at(int k, int i) const { return lo[k] + i * pitch(k); }
};

/// Argmax of the welfare over a 2-D grid.
inline Vector welfare_grid_argmax(const Matrix& P, double a, const Vector& b, const Grid2& g) {
  Vector best(2), x(2);
  double best_w = -INFINITY;
  for (int i = 0; i < g.points; ++i) {
    for (int j = 0; j < g.points; ++j) {
      x << g.at(0, i), g.at(1, j);
      const double w = welfare_sum(P, a, b, x);
      if (w > best_w) {
        best_w = w;
        best = x;
      }
    }
  }
  return best;
}

/// Grid point closest to being a mutual best response: each player's grid
/// best response to the other's grid action, then the pair minimising the
/// larger of the two best-response gaps.
inline Vector grid_nash(const Matrix& P, double a, const Vector& b, const Grid2& g) {
  std::vector<double> br[2];
  for (int k = 0; k < 2; ++k) {
    const int other = 1 - k;
    br[k].resize(static_cast<std::size_t>(g.points));
    for (int j = 0; j < g.points; ++j) {
      Vector x(2);
      x[other] = g.at(other, j);
      double best = -INFINITY;
      for (int i = 0; i < g.points; ++i) {
        x[k] = g.at(k, i);
        const double u = payoff_i(P, a, b, k, x, 0.0);
        if (u > best) {
          best = u;
          br[k][static_cast<std::size_t>(j)] = x[k];
        }
      }
    }
  }
  Vector best(2);
  double best_gap = INFINITY;
  for (int i = 0; i < g.points; ++i) {
    for (int j = 0; j < g.points; ++j) {
      const double x0 = g.at(0, i);
      const double x1 = g.at(1, j);
      const double gap = std::max(std::abs(x0 - br[0][static_cast<std::size_t>(j)]),
                                  std::abs(x1 - br[1][static_cast<std::size_t>(i)]));
      if (gap < best_gap) {
        best_gap = gap;
        best << x0, x1;
      }
    }
  }
  return best;
}

/// Deterministic uniform draws for property tests.
class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  Vector vector(Eigen::Index n, double lo, double hi) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oracle
