#include "netgame/sets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netgame/error.hpp"

namespace netgame {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_dim(const ConstraintSet& set, const Vector& z, const char* what) {
  if (static_cast<std::size_t>(z.size()) != set.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": vector has dimension " + std::to_string(z.size()) +
                    ", set has dimension " + std::to_string(set.dim()));
  }
}

void check_member(const ConstraintSet& set, const Vector& x, const char* what) {
  const double d = distance(set, x);
  if (!(d <= kMembershipTol)) {
    throw Error(ErrorCode::NotInSet,
                std::string(what) + ": base point is " + std::to_string(d) + " away from the set");
  }
}

}  // namespace

ConstraintSet ConstraintSet::box(std::vector<ScalarInterval> intervals) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi || iv.lo == kInf ||
        iv.hi == -kInf) {
      throw Error(ErrorCode::InvalidSet,
                  "interval " + std::to_string(i) + " is empty or malformed");
    }
  }
  return ConstraintSet(Box{std::move(intervals)});
}

ConstraintSet ConstraintSet::uniform_box(std::size_t dim, double lo, double hi) {
  return box(std::vector<ScalarInterval>(dim, ScalarInterval{lo, hi}));
}

ConstraintSet ConstraintSet::ball(std::size_t dim, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidSet, "ball radius must be positive and finite");
  }
  return ConstraintSet(Ball{dim, radius});
}

ConstraintSet ConstraintSet::subspace(std::size_t dim, std::vector<std::size_t> free) {
  std::sort(free.begin(), free.end());
  if (std::adjacent_find(free.begin(), free.end()) != free.end()) {
    throw Error(ErrorCode::InvalidSet, "subspace free indices must be distinct");
  }
  if (!free.empty() && free.back() >= dim) {
    throw Error(ErrorCode::InvalidSet, "subspace free index " + std::to_string(free.back()) +
                                           " out of range for dimension " + std::to_string(dim));
  }
  return ConstraintSet(Subspace{dim, std::move(free)});
}

ConstraintSet ConstraintSet::full(std::size_t dim) { return ConstraintSet(FullSpace{dim}); }

std::size_t ConstraintSet::dim() const {
  return std::visit(overloaded{
                        [](const Box& b) { return b.intervals.size(); },
                        [](const Ball& b) { return b.dim; },
                        [](const Subspace& s) { return s.dim; },
                        [](const FullSpace& f) { return f.dim; },
                    },
                    set_);
}

bool ConstraintSet::is_whole_space() const {
  return std::visit(overloaded{
                        [](const Box& b) {
                          return std::all_of(b.intervals.begin(), b.intervals.end(),
                                             [](const ScalarInterval& iv) {
                                               return !iv.bounded_below() && !iv.bounded_above();
                                             });
                        },
                        [](const Ball&) { return false; },
                        [](const Subspace& s) { return s.free.size() == s.dim; },
                        [](const FullSpace&) { return true; },
                    },
                    set_);
}

Vector project(const ConstraintSet& set, const Vector& z) {
  check_dim(set, z, "project");
  return std::visit(overloaded{
                        [&](const Box& b) {
                          Vector y = z;
                          for (Eigen::Index i = 0; i < y.size(); ++i) {
                            const auto& iv = b.intervals[static_cast<std::size_t>(i)];
                            y[i] = std::clamp(y[i], iv.lo, iv.hi);
                          }
                          return y;
                        },
                        [&](const Ball& b) {
                          const double norm = z.norm();
                          if (norm <= b.radius) return Vector(z);
                          return Vector(z * (b.radius / norm));
                        },
                        [&](const Subspace& s) {
                          Vector y = Vector::Zero(z.size());
                          for (std::size_t i : s.free) y[static_cast<Eigen::Index>(i)] = z[static_cast<Eigen::Index>(i)];
                          return y;
                        },
                        [&](const FullSpace&) { return Vector(z); },
                    },
                    set.variant());
}

double distance(const ConstraintSet& set, const Vector& z) { return (z - project(set, z)).norm(); }

bool contains(const ConstraintSet& set, const Vector& z, double tol) {
  return distance(set, z) <= tol;
}

Vector project_tangent(const ConstraintSet& set, const Vector& x, const Vector& v) {
  check_dim(set, x, "project_tangent");
  check_dim(set, v, "project_tangent");
  check_member(set, x, "project_tangent");
  return std::visit(
      overloaded{
          [&](const Box& b) {
            Vector t = v;
            for (Eigen::Index i = 0; i < t.size(); ++i) {
              const auto& iv = b.intervals[static_cast<std::size_t>(i)];
              const bool at_lo = iv.bounded_below() && std::abs(x[i] - iv.lo) <= kActiveBoundTol;
              const bool at_hi = iv.bounded_above() && std::abs(x[i] - iv.hi) <= kActiveBoundTol;
              if ((at_lo && t[i] < 0.0) || (at_hi && t[i] > 0.0)) t[i] = 0.0;
            }
            return t;
          },
          [&](const Ball& b) {
            const double norm = x.norm();
            if (norm < b.radius - kMembershipTol || norm == 0.0) return Vector(v);
            const Vector radial = x / norm;
            const double outward = v.dot(radial);
            if (outward <= 0.0) return Vector(v);
            return Vector(v - outward * radial);
          },
          [&](const Subspace&) { return project(set, v); },
          [&](const FullSpace&) { return Vector(v); },
      },
      set.variant());
}

MoreauParts decompose_moreau(const ConstraintSet& set, const Vector& x, const Vector& z) {
  MoreauParts parts;
  parts.tangent = project_tangent(set, x, z);
  parts.normal = z - parts.tangent;
  return parts;
}

}  // namespace netgame
