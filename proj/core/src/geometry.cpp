#include "sweep/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "sweep/errors.hpp"

namespace sweep {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kMaxEnumeration = 5e6;

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return r;
}

// Calls fn(indices) for every k-subset of {0, ..., n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(std::as_const(idx));
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Vector project_halfspace(const Halfspace& h, const Vector& x) {
  const double excess = h.normal.dot(x) - h.offset;
  if (excess <= 0.0) return x;
  return x - excess * h.normal;
}

Vector dykstra(const Polytope& poly, const Vector& x0, double tol) {
  const auto& hs = poly.halfspaces();
  std::vector<Vector> corr(hs.size(), Vector::Zero(x0.size()));
  Vector x = x0;
  for (int sweep = 0; sweep < kDykstraMaxSweeps; ++sweep) {
    const Vector before = x;
    double corr_change = 0.0;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const Vector y = x + corr[i];
      x = project_halfspace(hs[i], y);
      Vector next = y - x;
      corr_change += (next - corr[i]).squaredNorm();
      corr[i] = std::move(next);
    }
    if ((x - before).norm() < tol && std::sqrt(corr_change) < tol) return x;
  }
  throw PolytopeNonConvergence("Dykstra projection did not reach tolerance " + std::to_string(tol) +
                               " within " + std::to_string(kDykstraMaxSweeps) + " sweeps");
}

double box_axis_excess(double la, double ua, double lb, double ub) {
  // max over the two faces of A of the distance to [lb, ub] along one axis
  auto diff = [](double x, double y) { return x == y ? 0.0 : x - y; };
  return std::max({0.0, diff(lb, la), diff(ua, ub)});
}

double box_one_sided(const Box& a, const Box& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.lower.size(); ++i) {
    const double e = box_axis_excess(a.lower[i], a.upper[i], b.lower[i], b.upper[i]);
    s += e * e;
  }
  return std::sqrt(s);
}

}  // namespace

// -- Polytope ---------------------------------------------------------------

Polytope::Polytope(std::vector<Halfspace> halfspaces) : halfspaces_(std::move(halfspaces)) {
  if (halfspaces_.empty()) throw std::invalid_argument("polytope needs at least one halfspace");
  const Eigen::Index e = halfspaces_.front().normal.size();
  if (e < 1) throw std::invalid_argument("polytope dimension must be >= 1");
  for (auto& h : halfspaces_) {
    if (h.normal.size() != e) throw std::invalid_argument("polytope normals have inconsistent dimensions");
    const double len = h.normal.norm();
    if (!(len > 0.0) || !std::isfinite(len)) throw std::invalid_argument("polytope normal must be nonzero and finite");
    h.normal /= len;
    h.offset /= len;
  }
  const std::size_t m = halfspaces_.size();
  const auto ue = static_cast<std::size_t>(e);
  if (binomial(m, ue + 1) > kMaxEnumeration)
    throw std::invalid_argument("too many halfspaces for vertex enumeration in dimension " + std::to_string(e));

  Matrix normals(static_cast<Eigen::Index>(m), e);
  Vector offsets(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    normals.row(static_cast<Eigen::Index>(i)) = halfspaces_[i].normal.transpose();
    offsets[static_cast<Eigen::Index>(i)] = halfspaces_[i].offset;
  }
  if (Eigen::FullPivLU<Matrix>(normals).rank() < e)
    throw std::invalid_argument("polytope is unbounded: normals do not span the space");

  // Bounded iff the recession cone {d : N d <= 0} has no extreme ray.
  bool unbounded = false;
  for_each_subset(m, ue - 1, [&](const std::vector<std::size_t>& idx) {
    if (unbounded) return;
    Vector d;
    if (idx.empty()) {
      d = Vector::Ones(1);
    } else {
      Matrix a(static_cast<Eigen::Index>(idx.size()), e);
      for (std::size_t k = 0; k < idx.size(); ++k) a.row(static_cast<Eigen::Index>(k)) = halfspaces_[idx[k]].normal.transpose();
      Eigen::FullPivLU<Matrix> lu(a);
      if (lu.rank() != e - 1) return;
      d = lu.kernel().col(0).normalized();
    }
    for (double sign : {1.0, -1.0}) {
      const Vector nd = normals * (sign * d);
      if (nd.maxCoeff() <= 1e-12) unbounded = true;
    }
  });
  if (unbounded) throw std::invalid_argument("polytope is unbounded: a recession direction exists");

  const double scale = 1.0 + offsets.cwiseAbs().maxCoeff();
  for_each_subset(m, ue, [&](const std::vector<std::size_t>& idx) {
    Matrix a(e, e);
    Vector b(e);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      a.row(static_cast<Eigen::Index>(k)) = halfspaces_[idx[k]].normal.transpose();
      b[static_cast<Eigen::Index>(k)] = halfspaces_[idx[k]].offset;
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < e) return;
    const Vector v = lu.solve(b);
    if ((normals * v - offsets).maxCoeff() > kFeasTol * scale) return;
    for (const auto& w : vertices_)
      if ((w - v).norm() <= kFeasTol * scale) return;
    vertices_.push_back(v);
  });

  // Chebyshev center: maximize t subject to <n_i, x> + t <= b_i.
  Matrix lifted(static_cast<Eigen::Index>(m), e + 1);
  lifted.leftCols(e) = normals;
  lifted.col(e).setOnes();
  inradius_ = -std::numeric_limits<double>::infinity();
  for_each_subset(m, ue + 1, [&](const std::vector<std::size_t>& idx) {
    Matrix a(e + 1, e + 1);
    Vector b(e + 1);
    for (std::size_t k = 0; k < idx.size(); ++k) {
      a.row(static_cast<Eigen::Index>(k)) = lifted.row(static_cast<Eigen::Index>(idx[k]));
      b[static_cast<Eigen::Index>(k)] = offsets[static_cast<Eigen::Index>(idx[k])];
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.rank() < e + 1) return;
    const Vector sol = lu.solve(b);
    if ((lifted * sol - offsets).maxCoeff() > kFeasTol * scale) return;
    if (sol[e] > inradius_) {
      inradius_ = sol[e];
      chebyshev_center_ = sol.head(e);
    }
  });
  if (!(inradius_ > 0.0)) throw std::invalid_argument("polytope has empty interior");
}

// -- ConvexSet --------------------------------------------------------------

ConvexSet::ConvexSet(Variant v) : v_(std::move(v)) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          if (!(s.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
          if (s.center.size() < 1) throw std::invalid_argument("ball center must be nonempty");
        } else if constexpr (std::is_same_v<T, Box>) {
          if (s.lower.size() != s.upper.size() || s.lower.size() < 1)
            throw std::invalid_argument("box bounds must be nonempty and of equal dimension");
          for (Eigen::Index i = 0; i < s.lower.size(); ++i)
            if (!(s.lower[i] < s.upper[i])) throw std::invalid_argument("box requires lower < upper componentwise");
        } else if constexpr (std::is_same_v<T, Translated>) {
          if (!s.base) throw std::invalid_argument("translated set needs a base");
          if (s.base->dim() != s.shift.size()) throw std::invalid_argument("translation has the wrong dimension");
        }
      },
      v_);
}

ConvexSet ConvexSet::ball(Vector center, double radius) { return ConvexSet(Ball{std::move(center), radius}); }

ConvexSet ConvexSet::box(Vector lower, Vector upper) { return ConvexSet(Box{std::move(lower), std::move(upper)}); }

ConvexSet ConvexSet::polytope(std::vector<Halfspace> halfspaces) { return ConvexSet(Polytope(std::move(halfspaces))); }

ConvexSet ConvexSet::translated(const ConvexSet& base, const Vector& shift) {
  if (const auto* t = std::get_if<Translated>(&base.v_)) return ConvexSet(Translated{t->base, t->shift + shift});
  return ConvexSet(Translated{std::make_shared<const ConvexSet>(base), shift});
}

Eigen::Index ConvexSet::dim() const {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return s.center.size();
        else if constexpr (std::is_same_v<T, Box>) return s.lower.size();
        else if constexpr (std::is_same_v<T, Polytope>) return s.dim();
        else return s.shift.size();
      },
      v_);
}

bool contains(const ConvexSet& set, const Vector& x) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return (x - s.center).norm() <= s.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          return (x.array() >= s.lower.array()).all() && (x.array() <= s.upper.array()).all();
        } else if constexpr (std::is_same_v<T, Polytope>) {
          for (const auto& h : s.halfspaces())
            if (h.normal.dot(x) > h.offset) return false;
          return true;
        } else {
          return contains(*s.base, x - s.shift);
        }
      },
      set.variant());
}

Vector project(const ConvexSet& set, const Vector& x, double proj_tol) {
  if (x.size() != set.dim()) throw std::invalid_argument("projection point has the wrong dimension");
  return std::visit(
      [&](const auto& s) -> Vector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const Vector d = x - s.center;
          const double n = d.norm();
          if (n <= s.radius) return x;
          return s.center + (s.radius / n) * d;
        } else if constexpr (std::is_same_v<T, Box>) {
          return x.cwiseMax(s.lower).cwiseMin(s.upper);
        } else if constexpr (std::is_same_v<T, Polytope>) {
          if (contains(set, x)) return x;
          return dykstra(s, x, proj_tol);
        } else {
          const Vector local = x - s.shift;
          if (contains(*s.base, local)) return x;
          return s.shift + project(*s.base, local, proj_tol);
        }
      },
      set.variant());
}

double distance(const ConvexSet& set, const Vector& x, double proj_tol) {
  if (contains(set, x)) return 0.0;
  return (x - project(set, x, proj_tol)).norm();
}

double support(const ConvexSet& set, const Vector& u) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return u.dot(s.center) + s.radius * u.norm();
        } else if constexpr (std::is_same_v<T, Box>) {
          double h = 0.0;
          for (Eigen::Index i = 0; i < u.size(); ++i) {
            if (u[i] > 0.0) h += u[i] * s.upper[i];
            else if (u[i] < 0.0) h += u[i] * s.lower[i];
          }
          return h;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          double h = -std::numeric_limits<double>::infinity();
          for (const auto& v : s.vertices()) h = std::max(h, u.dot(v));
          return h;
        } else {
          return support(*s.base, u) + u.dot(s.shift);
        }
      },
      set.variant());
}

double inner_radius_at(const ConvexSet& set, const Vector& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s.radius - (x - s.center).norm();
        } else if constexpr (std::is_same_v<T, Box>) {
          return std::min((x - s.lower).minCoeff(), (s.upper - x).minCoeff());
        } else if constexpr (std::is_same_v<T, Polytope>) {
          double r = std::numeric_limits<double>::infinity();
          for (const auto& h : s.halfspaces()) r = std::min(r, h.offset - h.normal.dot(x));
          return r;
        } else {
          return inner_radius_at(*s.base, x - s.shift);
        }
      },
      set.variant());
}

double diameter(const ConvexSet& set) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return 2.0 * s.radius;
        } else if constexpr (std::is_same_v<T, Box>) {
          return (s.upper - s.lower).norm();
        } else if constexpr (std::is_same_v<T, Polytope>) {
          double d = 0.0;
          const auto& v = s.vertices();
          for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) d = std::max(d, (v[i] - v[j]).norm());
          return d;
        } else {
          return diameter(*s.base);
        }
      },
      set.variant());
}

std::vector<Vector> sample_directions(Eigen::Index dim, int count) {
  std::vector<Vector> dirs;
  if (dim == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
    return dirs;
  }
  dirs.reserve(static_cast<std::size_t>(count));
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      Vector u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
  } else if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rad = std::sqrt(1.0 - z * z);
      Vector u(3);
      u << rad * std::cos(golden * k), rad * std::sin(golden * k), z;
      dirs.push_back(u);
    }
  } else {
    std::mt19937_64 gen(0x5eedu);
    std::normal_distribution<double> normal;
    for (int k = 0; k < count; ++k) {
      Vector u(dim);
      for (Eigen::Index i = 0; i < dim; ++i) u[i] = normal(gen);
      dirs.push_back(u.normalized());
    }
  }
  return dirs;
}

HausdorffResult hausdorff(const ConvexSet& a, const ConvexSet& b, int n_dir) {
  if (a.dim() != b.dim()) throw std::invalid_argument("hausdorff: dimension mismatch");
  const auto& va = a.variant();
  const auto& vb = b.variant();
  if (const auto* ba = std::get_if<Ball>(&va)) {
    if (const auto* bb = std::get_if<Ball>(&vb))
      return {(ba->center - bb->center).norm() + std::abs(ba->radius - bb->radius), true};
  }
  if (const auto* xa = std::get_if<Box>(&va)) {
    if (const auto* xb = std::get_if<Box>(&vb)) return {std::max(box_one_sided(*xa, *xb), box_one_sided(*xb, *xa)), true};
  }
  if (const auto* ta = std::get_if<Translated>(&va)) {
    if (const auto* tb = std::get_if<Translated>(&vb)) {
      if (ta->base == tb->base) return {(ta->shift - tb->shift).norm(), true};
    }
  }
  HausdorffResult r;
  for (const auto& u : sample_directions(a.dim(), n_dir)) r.value = std::max(r.value, std::abs(support(a, u) - support(b, u)));
  r.is_exact = a.dim() == 1;
  return r;
}

// -- MovingConvexSet --------------------------------------------------------

MovingConvexSet::MovingConvexSet(double horizon, std::function<ConvexSet(double)> eval,
                                 std::function<Vector(double)> gamma, double r, std::optional<Hoelder> hoelder,
                                 bool is_static)
    : horizon_(horizon), eval_(std::move(eval)), gamma_(std::move(gamma)), r_(r), hoelder_(hoelder), static_(is_static) {
  if (!(horizon_ > 0.0)) throw std::invalid_argument("moving set horizon must be positive");
  if (!(r_ > 0.0)) throw std::invalid_argument("interior radius must be positive");
  if (!eval_ || !gamma_) throw std::invalid_argument("moving set needs eval and gamma");
  if (hoelder_ && (!(hoelder_->K >= 0.0) || !(hoelder_->alpha > 0.0) || hoelder_->alpha > 1.0))
    throw std::invalid_argument("Hoelder data requires K >= 0 and alpha in (0, 1]");
}

MovingConvexSet MovingConvexSet::constant(double horizon, ConvexSet set, Vector gamma, double r) {
  auto shared = std::make_shared<const ConvexSet>(std::move(set));
  return MovingConvexSet(
      horizon, [shared](double) { return *shared; }, [g = std::move(gamma)](double) { return g; }, r, Hoelder{0.0, 1.0},
      true);
}

MovingConvexSet MovingConvexSet::translating(double horizon, ConvexSet base, std::function<Vector(double)> motion,
                                             Vector gamma0, double r, std::optional<Hoelder> hoelder) {
  auto shared = std::make_shared<const ConvexSet>(std::move(base));
  return MovingConvexSet(
      horizon, [shared, motion](double t) { return ConvexSet(Translated{shared, motion(t)}); },
      [g = std::move(gamma0), motion](double t) -> Vector { return g + motion(t); }, r, hoelder, false);
}

ConvexSet MovingConvexSet::at(double t) const { return eval_(t); }

MarginReport verify_interior_ball(const MovingConvexSet& m, const Grid& grid) {
  if (grid.horizon() > m.horizon() * (1.0 + 1e-12)) throw std::invalid_argument("grid extends beyond the moving set horizon");
  MarginReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double margin = inner_radius_at(m.at(t), m.gamma(t)) - m.radius();
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin = k;
      rep.argmin_time = t;
    }
  }
  return rep;
}

}  // namespace sweep
