#include "sweep/solvers.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sweep/errors.hpp"

namespace sweep {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::CatchingUp: return "catching_up";
    case Scheme::Skorokhod: return "skorokhod";
    case Scheme::Euler: return "euler";
    case Scheme::PicardYoung: return "picard_young";
    case Scheme::PicardRough: return "picard_rough";
  }
  return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "catching_up") return Scheme::CatchingUp;
  if (s == "skorokhod") return Scheme::Skorokhod;
  if (s == "euler") return Scheme::Euler;
  if (s == "picard_young") return Scheme::PicardYoung;
  if (s == "picard_rough") return Scheme::PicardRough;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

namespace {

void require_feasible_start(const MovingConvexSet& m, const Vector& a, double proj_tol) {
  const ConvexSet c0 = m.at(0.0);
  if (a.size() != c0.dim()) throw std::invalid_argument("initial point has the wrong dimension");
  const double d = distance(c0, a, proj_tol);
  if (d > proj_tol) throw InfeasibleStart("initial point lies at distance " + std::to_string(d) + " from C(0)");
}

// One catching-up step on the translated set C - h: returns w if w + h is in C,
// otherwise -h + p_C(w + h).
Vector reflect_step(const ConvexSet& c, const Vector& w, const Vector& h, double proj_tol) {
  const Vector local = w + h;
  if (contains(c, local)) return w;
  return -h + project(c, local, proj_tol);
}

SweepingRun assemble(const Grid& grid, SamplePath H, Matrix y, Scheme scheme) {
  SamplePath Y(grid, std::move(y));
  Matrix x = H.values() + Y.values();
  SamplePath X(grid, std::move(x));
  return SweepingRun{grid, std::move(X), std::move(H), std::move(Y), 0, true, scheme, 0.0, std::nullopt, std::nullopt};
}

double sup_distance(const SamplePath& a, const SamplePath& b) {
  double d = 0.0;
  for (Eigen::Index k = 0; k < a.values().cols(); ++k) d = std::max(d, (a.values().col(k) - b.values().col(k)).norm());
  return d;
}

MatrixPath evaluate_field(const VectorField& f, const SamplePath& x) {
  MatrixPath out{x.grid(), {}};
  out.values.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out.values.push_back(f(x[k]));
  return out;
}

void check_field(const VectorField& f, Eigen::Index e, Eigen::Index d) {
  if (f.state_dim() != e) throw std::invalid_argument("vector field state dimension does not match the set");
  if (f.driver_dim() != d) throw std::invalid_argument("vector field driver dimension does not match the driver");
}

SamplePath initial_iterate(const MovingConvexSet& m, const Vector& a, const Grid& grid, const PicardOptions& opts) {
  if (opts.initial_guess) {
    require_same_grid(opts.initial_guess->grid(), grid, "picard initial guess");
    if (opts.initial_guess->dim() != a.size()) throw std::invalid_argument("initial guess has the wrong dimension");
    return *opts.initial_guess;
  }
  return catching_up(m, a, grid, opts.proj_tol).X;
}

}  // namespace

SweepingRun catching_up(const MovingConvexSet& m, const Vector& a, const Grid& grid, double proj_tol) {
  require_feasible_start(m, a, proj_tol);
  Matrix y(a.size(), static_cast<Eigen::Index>(grid.size()));
  y.col(0) = a;
  Vector cur = a;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    cur = project(m.at(grid[k + 1]), cur, proj_tol);
    y.col(static_cast<Eigen::Index>(k + 1)) = cur;
  }
  return assemble(grid, SamplePath::zeros(grid, a.size()), std::move(y), Scheme::CatchingUp);
}

SweepingRun skorokhod_decompose(const MovingConvexSet& m, const Vector& a, const SamplePath& h, double proj_tol) {
  if (h.dim() != a.size()) throw std::invalid_argument("perturbation has the wrong dimension");
  if (h[0].norm() != 0.0) throw std::invalid_argument("Skorokhod decomposition requires h(0) = 0");
  require_feasible_start(m, a, proj_tol);
  const Grid& grid = h.grid();
  Matrix y(a.size(), static_cast<Eigen::Index>(grid.size()));
  y.col(0) = a;
  Vector cur = a;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    cur = reflect_step(m.at(grid[k + 1]), cur, h[k + 1], proj_tol);
    y.col(static_cast<Eigen::Index>(k + 1)) = cur;
  }
  return assemble(grid, h, std::move(y), Scheme::Skorokhod);
}

SweepingRun euler_catching_up(const MovingConvexSet& m, const Vector& a, const VectorField& drift, const SamplePath& W,
                              double proj_tol) {
  const Eigen::Index e = a.size();
  check_field(drift, e, 1);
  if (W.dim() != e) throw std::invalid_argument("additive signal has the wrong dimension");
  if (W[0].norm() != 0.0) throw std::invalid_argument("additive signal must start at 0");
  require_feasible_start(m, a, proj_tol);
  const Grid& grid = W.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix h(e, n), y(e, n);
  Vector drift_acc = Vector::Zero(e);
  h.col(0) = drift_acc + W[0];
  y.col(0) = a;
  Vector cur = a;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Vector x = h.col(kk) + y.col(kk);
    drift_acc += drift(x).col(0) * grid.step(k);
    const Vector hk = drift_acc + W[k + 1];
    h.col(kk + 1) = hk;
    cur = reflect_step(m.at(grid[k + 1]), cur, hk, proj_tol);
    y.col(kk + 1) = cur;
  }
  return assemble(grid, SamplePath(grid, std::move(h)), std::move(y), Scheme::Euler);
}

SweepingRun picard_young(const MovingConvexSet& m, const Vector& a, const VectorField& f, const SamplePath& z,
                         const PicardOptions& opts) {
  check_field(f, a.size(), z.dim());
  const Grid& grid = z.grid();
  SamplePath prev = initial_iterate(m, a, grid, opts);
  std::optional<SweepingRun> run;
  bool converged = false;
  std::size_t iter = 0;
  double diff = 0.0;
  while (iter < opts.max_iter) {
    ++iter;
    const SamplePath H = young_integral(evaluate_field(f, prev), z);
    run = skorokhod_decompose(m, a, H, opts.proj_tol);
    diff = sup_distance(run->X, prev);
    prev = run->X;
    if (diff < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!run) throw std::invalid_argument("picard_young needs max_iter >= 1");
  run->scheme = Scheme::PicardYoung;
  run->iterations = iter;
  run->converged = converged;
  run->last_update = diff;
  run->integrand = evaluate_field(f, run->X);
  run->driver = z;
  return std::move(*run);
}

SweepingRun picard_rough(const MovingConvexSet& m, const Vector& a, const VectorField& f,
                         std::shared_ptr<const RoughLift> lift, const PicardOptions& opts) {
  if (!lift) throw std::invalid_argument("picard_rough needs a lift");
  check_field(f, a.size(), lift->dim());
  const Grid& grid = lift->grid();
  const Eigen::Index e = a.size(), d = lift->dim();
  SamplePath prev = initial_iterate(m, a, grid, opts);
  // X_0 has bounded variation, so its Gubinelli derivative is zero.
  std::vector<Matrix> prev_derivative(grid.size(), Matrix::Zero(e, d));
  std::optional<SweepingRun> run;
  bool converged = false;
  std::size_t iter = 0;
  double diff = 0.0;
  while (iter < opts.max_iter) {
    ++iter;
    const ControlledPath x = make_controlled(prev, prev_derivative, lift);
    const ControlledPath integrand = compose_controlled(f, x);
    const SamplePath H = rough_integral(integrand, *lift);
    run = skorokhod_decompose(m, a, H, opts.proj_tol);
    diff = sup_distance(run->X, prev);
    prev_derivative = std::move(evaluate_field(f, prev).values);
    prev = run->X;
    if (diff < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!run) throw std::invalid_argument("picard_rough needs max_iter >= 1");
  run->scheme = Scheme::PicardRough;
  run->iterations = iter;
  run->converged = converged;
  run->last_update = diff;
  run->integrand = evaluate_field(f, run->X);
  run->driver = lift->base();
  return std::move(*run);
}

}  // namespace sweep
