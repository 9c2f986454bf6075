#include "sweep/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>

#include "sweep/errors.hpp"

namespace sweep {

namespace {

std::vector<ConvexSet> sets_on_grid(const MovingConvexSet& m, const Grid& grid) {
  std::vector<ConvexSet> sets;
  sets.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) sets.push_back(m.at(grid[k]));
  return sets;
}

double oscillation(const SamplePath& h) {
  double osc = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) osc = std::max(osc, (h[j] - h[i]).norm());
  return osc;
}

}  // namespace

FeasibilityReport feasibility_report(const SweepingRun& run, const MovingConvexSet& m, double proj_tol) {
  FeasibilityReport rep;
  for (std::size_t k = 0; k < run.grid.size(); ++k) {
    const double d = distance(m.at(run.grid[k]), run.X[k], proj_tol);
    if (d > rep.max_violation) {
      rep.max_violation = d;
      rep.argmax = k;
    }
  }
  return rep;
}

double identity_defect(const SweepingRun& run) {
  return (run.X.values() - (run.H.values() + run.Y.values())).cwiseAbs().maxCoeff();
}

WindowDissection build_window_dissection(const SweepingRun& run, const MovingConvexSet& m, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("window radius must be positive");
  const Grid& grid = run.grid;
  const auto sets = sets_on_grid(m, grid);
  WindowDissection wd;
  wd.R = R;
  wd.breakpoints.push_back(0);
  std::size_t start = 0;
  const std::size_t last = grid.size() - 1;
  while (start < last) {
    const Vector centre = m.gamma(grid[start]);
    auto admissible = [&](std::size_t u) {
      return inner_radius_at(sets[u], centre) >= R && (run.H[u] - run.H[start]).norm() <= 0.5 * R;
    };
    if (!admissible(start)) return wd;
    std::size_t end = start;
    while (end < last && admissible(end + 1)) ++end;
    if (end == start) return wd;
    wd.breakpoints.push_back(end);
    start = end;
  }
  wd.valid = true;
  return wd;
}

VariationBoundReport variation_bound_check(const SweepingRun& run, const MovingConvexSet& m,
                                           const VariationBoundParams& params, VariationBound kind) {
  VariationBoundReport rep;
  rep.y_variation = p_variation(run.Y, 1.0);
  switch (kind) {
    case VariationBound::Valadier:
      rep.bound = valadier_l(params.r, params.S, params.e);
      break;
    case VariationBound::Rho: {
      double diam = 0.0;
      for (std::size_t k = 0; k < run.grid.size(); ++k) diam = std::max(diam, diameter(m.at(run.grid[k])));
      rep.bound = bound_M_rho(params.N, params.rho, diam);
      break;
    }
    case VariationBound::NR: {
      double gamma_sup = 0.0;
      for (std::size_t k = 0; k < run.grid.size(); ++k) gamma_sup = std::max(gamma_sup, m.gamma(run.grid[k]).norm());
      rep.bound = bound_M_NR(params.N, params.R, gamma_sup, run.X.sup_norm(), oscillation(run.H));
      break;
    }
  }
  return rep;
}

NormalConeReport normal_cone_check(const SweepingRun& run, const MovingConvexSet& m, int directions) {
  const Grid& grid = run.grid;
  const auto sets = sets_on_grid(m, grid);
  const Eigen::Index e = run.Y.dim();
  const double ysup = run.Y.sup_norm();
  NormalConeReport rep;
  rep.tolerance = 1e-8 * (1.0 + ysup * ysup);
  rep.worst_slack = std::numeric_limits<double>::infinity();
  const auto dirs = sample_directions(e, directions);
  const double r = m.radius();
  const std::size_t steps = grid.steps();

  auto check_window = [&](std::size_t s, std::size_t t) {
    ++rep.windows;
    const Vector dy = run.Y[t] - run.Y[s];
    const double rhs = 0.5 * (run.Y[t].squaredNorm() - run.Y[s].squaredNorm());
    for (std::size_t tau : {s, (s + t) / 2, t}) {
      const Vector base = m.gamma(grid[tau]) - run.H[tau];
      std::vector<Vector> probes{base};
      for (double rho : {0.5 * r, r})
        for (const auto& u : dirs) probes.push_back(base + rho * u);
      for (const auto& z : probes) {
        bool inside = true;
        for (std::size_t k = s; k <= t && inside; ++k) inside = contains(sets[k], Vector(z + run.H[k]));
        if (!inside) continue;
        ++rep.probes;
        rep.worst_slack = std::min(rep.worst_slack, z.dot(dy) - rhs);
      }
    }
  };

  for (std::size_t len = 1; len <= steps; len *= 2) {
    for (std::size_t s = 0; s + len <= steps; s += len) check_window(s, s + len);
    if (len > steps / 2) break;
  }
  if ((steps & (steps - 1)) != 0) check_window(0, steps);
  if (rep.probes == 0) rep.worst_slack = 0.0;
  return rep;
}

namespace {

double one_var_times_sup(const SweepingRun& r) { return p_variation(r.Y, 1.0) * r.X.sup_norm(); }

template <typename StateIncrement>
UniquenessReport pair_functional(const SweepingRun& a, const SweepingRun& b, WindowSampling sampling,
                                 StateIncrement&& increment) {
  require_same_grid(a.grid, b.grid, "uniqueness functional");
  if (a.X.dim() != b.X.dim()) throw std::invalid_argument("uniqueness functional: dimension mismatch");
  UniquenessReport rep;
  rep.tolerance = 1e-6 * (1.0 + std::max(one_var_times_sup(a), one_var_times_sup(b)));
  const std::size_t n = a.grid.size();
  for (std::size_t u = 0; u + 1 < n; ++u) {
    double acc = 0.0;
    std::size_t next_dyadic = u + 1;
    for (std::size_t k = u; k + 1 < n; ++k) {
      const Vector dx = increment(a, u, k) - increment(b, u, k);
      const Vector dy = (a.Y[k + 1] - a.Y[k]) - (b.Y[k + 1] - b.Y[k]);
      acc += dx.dot(dy);
      const std::size_t v = k + 1;
      if (sampling.full || v == next_dyadic) {
        if (acc > rep.value) {
          rep.value = acc;
          rep.u = u;
          rep.v = v;
        }
        if (v == next_dyadic) next_dyadic = u + 2 * (next_dyadic - u);
      }
      if (!sampling.full && next_dyadic >= n) break;
    }
  }
  return rep;
}

}  // namespace

UniquenessReport uniqueness_functional_young(const SweepingRun& run1, const SweepingRun& run2, WindowSampling sampling) {
  return pair_functional(run1, run2, sampling,
                         [](const SweepingRun& r, std::size_t u, std::size_t k) -> Vector { return r.X[k] - r.X[u]; });
}

UniquenessReport uniqueness_functional_rough(const SweepingRun& run1, const SweepingRun& run2, WindowSampling sampling) {
  for (const auto* r : {&run1, &run2})
    if (!r->integrand || !r->driver)
      throw std::invalid_argument("rough uniqueness functional needs runs with integrand and driver");
  return pair_functional(run1, run2, sampling, [](const SweepingRun& r, std::size_t u, std::size_t k) -> Vector {
    return (r.X[k] - r.X[u]) - r.integrand->values[u] * (r.driver->operator[](k) - r.driver->operator[](u));
  });
}

double log_log_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

ConvergenceReport convergence_study(const std::function<SweepingRun(std::size_t)>& solve,
                                    std::span<const std::size_t> n_list, double theory_order, bool parallel) {
  if (n_list.empty()) throw std::invalid_argument("convergence study needs at least one grid size");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] == 0) throw std::invalid_argument("grid sizes must be positive");
    if (i > 0 && (n_list[i] < n_list[i - 1] || n_list[i] % n_list[i - 1] != 0))
      throw std::invalid_argument("grid sizes must be ascending and nested (each dividing the next)");
  }
  std::vector<SweepingRun> runs;
  runs.reserve(n_list.size());
  if (parallel && n_list.size() > 1) {
    std::vector<std::future<SweepingRun>> jobs;
    for (std::size_t n : n_list) jobs.push_back(std::async(std::launch::async, solve, n));
    for (auto& j : jobs) runs.push_back(j.get());
  } else {
    for (std::size_t n : n_list) runs.push_back(solve(n));
  }

  ConvergenceReport rep;
  rep.grid_sizes.assign(n_list.begin(), n_list.end());
  rep.theory_order = theory_order;
  std::vector<double> ns;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const SweepingRun& coarse = runs[i];
    const SweepingRun& fine = runs[i + 1];
    if (coarse.grid.steps() != n_list[i] || fine.grid.steps() != n_list[i + 1])
      throw std::invalid_argument("solver returned a grid of unexpected size");
    const std::size_t stride = n_list[i + 1] / n_list[i];
    double gap = 0.0;
    for (std::size_t k = 0; k < coarse.grid.size(); ++k) gap = std::max(gap, (coarse.X[k] - fine.X[k * stride]).norm());
    rep.sup_gaps.push_back(gap);
    ns.push_back(static_cast<double>(n_list[i]));
  }
  rep.empirical_order = -log_log_slope(ns, rep.sup_gaps);
  return rep;
}

}  // namespace sweep
