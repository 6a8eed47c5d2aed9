#pragma once

#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace netgame {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Distance tolerance for "x lies in the set" preconditions.
inline constexpr double kMembershipTol = 1e-9;
/// A box coordinate counts as sitting on a bound within this distance.
inline constexpr double kActiveBoundTol = 1e-9;

/// Closed interval on the extended real line.
struct ScalarInterval {
  double lo = -kInf;
  double hi = kInf;

  bool bounded_below() const { return lo > -kInf; }
  bool bounded_above() const { return hi < kInf; }
  friend bool operator==(const ScalarInterval&, const ScalarInterval&) = default;
};

/// Product of scalar intervals.
struct Box {
  std::vector<ScalarInterval> intervals;
  friend bool operator==(const Box&, const Box&) = default;
};

/// Euclidean ball centred at the origin.
struct Ball {
  std::size_t dim = 0;
  double radius = 1.0;
  friend bool operator==(const Ball&, const Ball&) = default;
};

/// Coordinate subspace: coordinates listed in `free` are unconstrained,
/// every other coordinate is pinned to zero. `free` is kept sorted.
struct Subspace {
  std::size_t dim = 0;
  std::vector<std::size_t> free;
  friend bool operator==(const Subspace&, const Subspace&) = default;
};

struct FullSpace {
  std::size_t dim = 0;
  friend bool operator==(const FullSpace&, const FullSpace&) = default;
};

/// Nonempty closed convex set with a closed-form Euclidean projection.
/// Immutable once built; the factories validate their arguments and throw
/// Error{InvalidSet} on bad input.
class ConstraintSet {
 public:
  using Variant = std::variant<Box, Ball, Subspace, FullSpace>;

  static ConstraintSet box(std::vector<ScalarInterval> intervals);
  static ConstraintSet uniform_box(std::size_t dim, double lo, double hi);
  static ConstraintSet ball(std::size_t dim, double radius);
  static ConstraintSet subspace(std::size_t dim, std::vector<std::size_t> free);
  static ConstraintSet full(std::size_t dim);

  std::size_t dim() const;
  const Variant& variant() const { return set_; }

  bool is_box() const { return std::holds_alternative<Box>(set_); }
  const Box* as_box() const { return std::get_if<Box>(&set_); }

  /// True when the set is all of R^n, whatever variant represents it.
  bool is_whole_space() const;

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

 private:
  explicit ConstraintSet(Variant v) : set_(std::move(v)) {}
  Variant set_;
};

struct MoreauParts {
  Vector tangent;
  Vector normal;
};

/// Euclidean projection onto the set.
Vector project(const ConstraintSet& set, const Vector& z);

/// Projection of v onto the tangent cone of the set at x.
/// Throws NotInSet when x is farther than kMembershipTol from the set.
Vector project_tangent(const ConstraintSet& set, const Vector& x, const Vector& v);

/// Splits z into its tangent-cone and normal-cone projections at x.
/// tangent + normal == z and the two parts are orthogonal.
MoreauParts decompose_moreau(const ConstraintSet& set, const Vector& x, const Vector& z);

/// distance(z, set) <= tol.
bool contains(const ConstraintSet& set, const Vector& z, double tol = 0.0);

double distance(const ConstraintSet& set, const Vector& z);

}  // namespace netgame
