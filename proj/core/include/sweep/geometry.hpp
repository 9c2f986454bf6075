#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "sweep/path.hpp"

namespace sweep {

inline constexpr double kDefaultProjTol = 1e-10;
inline constexpr int kDykstraMaxSweeps = 10000;

/// Closed Euclidean ball, radius > 0.
struct Ball {
  Vector center;
  double radius;
};

/// Axis-aligned box lower < upper componentwise. Infinite bounds are accepted
/// so that half-lines and slabs can be written as boxes.
struct Box {
  Vector lower;
  Vector upper;
};

/// { x : <normal, x> <= offset } with a unit normal.
struct Halfspace {
  Vector normal;
  double offset;
};

/// Bounded intersection of halfspaces with nonempty interior.
class Polytope {
 public:
  /// Normalizes the normals, then checks boundedness and the existence of a
  /// strictly interior point by enumerating candidate vertices. Throws
  /// std::invalid_argument when either check fails.
  explicit Polytope(std::vector<Halfspace> halfspaces);

  const std::vector<Halfspace>& halfspaces() const noexcept { return halfspaces_; }
  const std::vector<Vector>& vertices() const noexcept { return vertices_; }
  /// Center of the largest inscribed ball found by the feasibility probe.
  const Vector& chebyshev_center() const noexcept { return chebyshev_center_; }
  double inradius() const noexcept { return inradius_; }
  Eigen::Index dim() const noexcept { return halfspaces_.front().normal.size(); }

 private:
  std::vector<Halfspace> halfspaces_;
  std::vector<Vector> vertices_;
  Vector chebyshev_center_;
  double inradius_ = 0.0;
};

class ConvexSet;

/// base + shift
struct Translated {
  std::shared_ptr<const ConvexSet> base;
  Vector shift;
};

class ConvexSet {
 public:
  using Variant = std::variant<Ball, Box, Polytope, Translated>;

  /// Validates the family invariants; throws std::invalid_argument.
  ConvexSet(Variant v);  // NOLINT(google-explicit-constructor)

  static ConvexSet ball(Vector center, double radius);
  static ConvexSet box(Vector lower, Vector upper);
  static ConvexSet polytope(std::vector<Halfspace> halfspaces);
  /// Translation of `base`; nested translations are flattened.
  static ConvexSet translated(const ConvexSet& base, const Vector& shift);

  const Variant& variant() const noexcept { return v_; }
  Eigen::Index dim() const;

 private:
  Variant v_;
};

/// Membership test with no tolerance (Dykstra results may sit ~proj_tol outside).
bool contains(const ConvexSet& set, const Vector& x);

/// Nearest point of `set` to x. Points already inside are returned unchanged.
/// Polytopes use Dykstra's alternating projections onto their halfspaces and
/// throw PolytopeNonConvergence after kDykstraMaxSweeps sweeps.
Vector project(const ConvexSet& set, const Vector& x, double proj_tol = kDefaultProjTol);

double distance(const ConvexSet& set, const Vector& x, double proj_tol = kDefaultProjTol);

/// h_C(u) = sup_{x in C} <u, x>
double support(const ConvexSet& set, const Vector& u);

/// Largest radius rho with B(x, rho) contained in the set (negative if x is outside).
double inner_radius_at(const ConvexSet& set, const Vector& x);

/// sup_{x,y in C} ||x - y||
double diameter(const ConvexSet& set);

struct HausdorffResult {
  double value = 0.0;
  bool is_exact = false;
};

/// Exact for Ball/Ball, Box/Box and translates of a common base; otherwise the
/// maximum of |h_A(u) - h_B(u)| over quasi-uniform unit directions u, which
/// never exceeds the true distance.
HausdorffResult hausdorff(const ConvexSet& a, const ConvexSet& b, int n_dir = 256);

/// Quasi-uniform unit directions in R^dim (circle / Fibonacci sphere for
/// dim <= 3, seeded Gaussian directions above).
std::vector<Vector> sample_directions(Eigen::Index dim, int count);

// -- moving sets ------------------------------------------------------------

struct Hoelder {
  double K;
  double alpha;
};

/// t -> C(t) on [0, T] with a user-supplied selection gamma and radius r such
/// that B(gamma(t), r) is meant to lie inside C(t).
class MovingConvexSet {
 public:
  MovingConvexSet(double horizon, std::function<ConvexSet(double)> eval,
                  std::function<Vector(double)> gamma, double r,
                  std::optional<Hoelder> hoelder = std::nullopt, bool is_static = false);

  /// C(t) = set for every t.
  static MovingConvexSet constant(double horizon, ConvexSet set, Vector gamma, double r);
  /// C(t) = base + motion(t), gamma(t) = gamma0 + motion(t).
  static MovingConvexSet translating(double horizon, ConvexSet base, std::function<Vector(double)> motion,
                                     Vector gamma0, double r, std::optional<Hoelder> hoelder = std::nullopt);

  ConvexSet at(double t) const;
  Vector gamma(double t) const { return gamma_(t); }
  double radius() const noexcept { return r_; }
  double horizon() const noexcept { return horizon_; }
  const std::optional<Hoelder>& hoelder() const noexcept { return hoelder_; }
  bool is_static() const noexcept { return static_; }

 private:
  double horizon_;
  std::function<ConvexSet(double)> eval_;
  std::function<Vector(double)> gamma_;
  double r_;
  std::optional<Hoelder> hoelder_;
  bool static_;
};

struct MarginReport {
  double min_margin = 0.0;
  std::size_t argmin = 0;  ///< grid index of the smallest margin
  double argmin_time = 0.0;
  bool violated() const noexcept { return min_margin < 0.0; }
};

/// margin(t) = r_max(t) - r over the grid, where r_max(t) is the largest
/// radius of a ball around gamma(t) inside C(t).
MarginReport verify_interior_ball(const MovingConvexSet& m, const Grid& grid);

}  // namespace sweep
