#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sweep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Strictly increasing dissection t_0 = 0 < t_1 < ... < t_n = T of [0, T].
class Grid {
 public:
  /// Validates strict monotonicity and t_0 = 0; throws std::invalid_argument.
  explicit Grid(std::vector<double> times);

  /// n equal steps of size T/n; the last time is exactly T.
  static Grid uniform(double horizon, std::size_t steps);

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t steps() const noexcept { return times_.size() - 1; }
  double operator[](std::size_t k) const { return times_[k]; }
  double horizon() const noexcept { return times_.back(); }
  double step(std::size_t k) const { return times_[k + 1] - times_[k]; }
  std::span<const double> times() const noexcept { return times_; }

  /// Every stride-th point; stride must divide steps().
  Grid subsample(std::size_t stride) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::vector<double> times_;
};

/// Vector-valued path sampled on a grid. Column k holds the value at t_k.
class SamplePath {
 public:
  SamplePath(Grid grid, Matrix values);

  /// Constant zero path of the given dimension.
  static SamplePath zeros(Grid grid, Eigen::Index dim);
  /// Samples fn(t_k) on the grid.
  static SamplePath sample(Grid grid, const std::function<Vector(double)>& fn);

  const Grid& grid() const noexcept { return grid_; }
  const Matrix& values() const noexcept { return values_; }
  Eigen::Index dim() const noexcept { return values_.rows(); }
  std::size_t size() const noexcept { return grid_.size(); }

  auto operator[](std::size_t k) const { return values_.col(static_cast<Eigen::Index>(k)); }
  /// x(s,t) := x(t) - x(s) for grid indices s, t.
  Vector increment(std::size_t s, std::size_t t) const;

  /// Restriction to every stride-th grid point.
  SamplePath subsample(std::size_t stride) const;

  /// sup_k ||x(t_k)||
  double sup_norm() const;

 private:
  Grid grid_;
  Matrix values_;
};

/// Matrix-valued path (integrands, Gubinelli derivatives).
struct MatrixPath {
  Grid grid;
  std::vector<Matrix> values;

  std::size_t size() const noexcept { return values.size(); }
};

/// Throws GridMismatch unless the grids are identical.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

// -- p-variation ------------------------------------------------------------

struct PVariation {
  double value = 0.0;
  /// Grid indices of an optimal dissection, endpoints included.
  std::vector<std::size_t> dissection;
};

/// Exact p-variation of the sampled skeleton on the grid window [s, t].
/// Dynamic programming over sub-dissections, O(m^2) in the window length;
/// p = 1 reduces to the sum of consecutive increment norms.
double p_variation(const SamplePath& x, double p, std::size_t s, std::size_t t);
/// Whole-horizon convenience overload.
double p_variation(const SamplePath& x, double p);
/// Same DP, also returning the maximizing dissection.
PVariation p_variation_argmax(const SamplePath& x, double p, std::size_t s, std::size_t t);

/// Supremum over dissections of [s, t] of sum ||r(t_i, t_{i+1})||^q for a
/// two-parameter increment norm (e.g. a controlled-path remainder). Returns
/// the sum itself, not its 1/q-th power.
double two_parameter_variation_power(std::size_t s, std::size_t t, double q,
                                     const std::function<double(std::size_t, std::size_t)>& norm);

/// All-pairs table w(s,t) = ||x||^p_{p-var,s,t}; O(n^3).
Matrix p_variation_control(const SamplePath& x, double p);

// -- control functions ------------------------------------------------------

struct SuperadditivityReport {
  double worst_violation = 0.0;  ///< max of w(s,u) + w(u,t) - w(s,t) over triples
  double tolerance = 0.0;
  std::size_t s = 0, u = 0, t = 0;
  bool satisfied() const noexcept { return worst_violation <= tolerance; }
};

/// Checks w(s,u) + w(u,t) <= w(s,t) + tol on all grid triples s <= u <= t,
/// with tol = 1e-12 (1 + |w(0, n-1)|).
SuperadditivityReport check_control_superadditive(const Matrix& omega);
SuperadditivityReport check_control_superadditive(
    std::size_t points, const std::function<double(std::size_t, std::size_t)>& omega);

// -- explicit variation bounds ----------------------------------------------

struct VariationBoundParams {
  double r = 1.0;     ///< interior radius for the Valadier bound
  double S = 0.0;     ///< initial distance ||a - x|| for the Valadier bound
  int e = 1;          ///< state dimension
  int N = 1;          ///< number of interior-ball windows
  double R = 1.0;     ///< window ball radius
  double rho = 1.0;   ///< perturbation oscillation bound
};

/// l(s, S) = max(0, (S^2 - s^2) / 2s) if e > 1, max(0, S - s) if e = 1.
double valadier_l(double s, double S, int e);
/// N diam^2 / (2 rho)
double bound_M_rho(int N, double rho, double diam_sup);
/// N (gamma_sup + x_sup + phi_T)^2 / R
double bound_M_NR(int N, double R, double gamma_sup, double x_sup, double phi_T);

}  // namespace sweep
