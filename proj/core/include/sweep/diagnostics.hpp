#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sweep/solvers.hpp"

namespace sweep {

struct FeasibilityReport {
  double max_violation = 0.0;
  std::size_t argmax = 0;
};

/// max_k distance(C(t_k), X(t_k))
FeasibilityReport feasibility_report(const SweepingRun& run, const MovingConvexSet& m,
                                     double proj_tol = kDefaultProjTol);

/// Largest deviation |X - (H + Y)| over the grid; zero for every solver here.
double identity_defect(const SweepingRun& run);

// -- variation bounds -------------------------------------------------------

/// Grid dissection tau_0 = 0 < ... < tau_N = T such that
/// B(gamma(tau_i), R) lies in C(u) and |H(u) - H(tau_i)| <= R / 2 for every
/// grid time u in [tau_i, tau_{i+1}].
struct WindowDissection {
  std::vector<std::size_t> breakpoints;
  double R = 0.0;
  bool valid = false;
  int windows() const noexcept { return breakpoints.empty() ? 0 : static_cast<int>(breakpoints.size()) - 1; }
};

/// Greedy maximal windows; invalid if some single grid step already breaks the
/// conditions.
WindowDissection build_window_dissection(const SweepingRun& run, const MovingConvexSet& m, double R);

enum class VariationBound {
  Valadier,  ///< l(r, S) for the unperturbed scheme with a fixed inner ball
  Rho,       ///< N diam^2 / (2 rho)
  NR,        ///< N (|gamma|_inf + |X|_inf + phi(0,T))^2 / R
};

struct VariationBoundReport {
  double y_variation = 0.0;
  double bound = 0.0;
  bool satisfied() const noexcept { return y_variation <= bound; }
};

/// Compares ||Y||_{1-var,T} with the selected bound. For NR, gamma_sup and
/// x_sup are taken over the grid and phi(0,T) is the oscillation of H over
/// [0, T]; for Rho the diameter is maximized over grid times.
VariationBoundReport variation_bound_check(const SweepingRun& run, const MovingConvexSet& m,
                                           const VariationBoundParams& params, VariationBound kind);

// -- discrete normal-cone inequality ---------------------------------------

struct NormalConeReport {
  double worst_slack = 0.0;   ///< min of <z, Y(t) - Y(s)> - (|Y(t)|^2 - |Y(s)|^2) / 2
  double tolerance = 0.0;     ///< 1e-8 (1 + |Y|_inf^2)
  std::size_t windows = 0;
  std::size_t probes = 0;     ///< accepted probe points
  bool satisfied() const noexcept { return worst_slack >= -tolerance; }
};

/// Checks <z, Y(t) - Y(s)> >= (|Y(t)|^2 - |Y(s)|^2) / 2 on dyadic windows
/// [j L, (j + 1) L] for probes z = gamma(tau) - H(tau) + rho u (u from a fixed
/// direction set, rho in {0, r/2, r}), kept only if z + H(tau') is in C(tau')
/// for every grid time tau' of the window. A sampled, not exhaustive, check.
NormalConeReport normal_cone_check(const SweepingRun& run, const MovingConvexSet& m, int directions = 8);

// -- uniqueness functionals -------------------------------------------------

struct WindowSampling {
  /// Every grid anchor u; window ends u + 2^j. With full = true, every v > u.
  bool full = false;
};

struct UniquenessReport {
  double value = -std::numeric_limits<double>::infinity();  ///< max over sampled windows
  std::size_t u = 0, v = 0;
  double tolerance = 0.0;  ///< 1e-6 (1 + |Y|_{1-var} |X|_inf), larger of the two runs
  bool consistent() const noexcept { return value <= tolerance; }
};

/// sum_{k=u}^{v-1} <(X(t_k) - X(u)) - (X*(t_k) - X*(u)), dY_k - dY*_k>
UniquenessReport uniqueness_functional_young(const SweepingRun& run1, const SweepingRun& run2,
                                             WindowSampling sampling = {});

/// Same pairing with remainders R_X(u, t_k) = X(u, t_k) - f(X(u)) z(u, t_k).
/// Both runs must carry integrand and driver.
UniquenessReport uniqueness_functional_rough(const SweepingRun& run1, const SweepingRun& run2,
                                             WindowSampling sampling = {});

// -- convergence ladders ----------------------------------------------------

struct ConvergenceReport {
  std::vector<std::size_t> grid_sizes;
  std::vector<double> sup_gaps;  ///< gap i compares n_i with n_{i+1} at the n_i grid points
  double empirical_order = 0.0;  ///< -slope of log gap against log n; NaN if undefined
  double theory_order = 0.0;     ///< alpha ^ 1/q
};

/// Runs solve(n) for every n (concurrently) and compares consecutive levels at
/// the coarse grid points. n_list must be ascending with each entry dividing
/// the next; throws std::invalid_argument otherwise.
ConvergenceReport convergence_study(const std::function<SweepingRun(std::size_t)>& solve,
                                    std::span<const std::size_t> n_list, double theory_order,
                                    bool parallel = true);

/// Least-squares slope of log y against log x.
double log_log_slope(std::span<const double> x, std::span<const double> y);

}  // namespace sweep
