#include "sweep/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sweep/errors.hpp"

namespace sweep {

Grid::Grid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw std::invalid_argument("grid needs at least two points");
  if (times_.front() != 0.0) throw std::invalid_argument("grid must start at t = 0");
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1]))
      throw std::invalid_argument("grid times must be strictly increasing (index " +
                                  std::to_string(k) + ")");
  }
}

Grid Grid::uniform(double horizon, std::size_t steps) {
  if (steps == 0) throw std::invalid_argument("uniform grid needs n >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k)
    t[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
  t.back() = horizon;
  return Grid(std::move(t));
}

Grid Grid::subsample(std::size_t stride) const {
  if (stride == 0 || steps() % stride != 0)
    throw std::invalid_argument("subsample stride must divide the number of steps");
  std::vector<double> t;
  t.reserve(steps() / stride + 1);
  for (std::size_t k = 0; k < times_.size(); k += stride) t.push_back(times_[k]);
  return Grid(std::move(t));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw GridMismatch(std::string(what) + ": grids differ");
}

SamplePath::SamplePath(Grid grid, Matrix values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.cols()) != grid_.size())
    throw std::invalid_argument("path has " + std::to_string(values_.cols()) + " samples for " +
                                std::to_string(grid_.size()) + " grid points");
}

SamplePath SamplePath::zeros(Grid grid, Eigen::Index dim) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return SamplePath(std::move(grid), Matrix::Zero(dim, n));
}

SamplePath SamplePath::sample(Grid grid, const std::function<Vector(double)>& fn) {
  const Vector first = fn(grid[0]);
  Matrix v(first.size(), static_cast<Eigen::Index>(grid.size()));
  v.col(0) = first;
  for (std::size_t k = 1; k < grid.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = fn(grid[k]);
  return SamplePath(std::move(grid), std::move(v));
}

Vector SamplePath::increment(std::size_t s, std::size_t t) const {
  return values_.col(static_cast<Eigen::Index>(t)) - values_.col(static_cast<Eigen::Index>(s));
}

SamplePath SamplePath::subsample(std::size_t stride) const {
  Grid g = grid_.subsample(stride);
  Matrix v(values_.rows(), static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k)
    v.col(static_cast<Eigen::Index>(k)) = values_.col(static_cast<Eigen::Index>(k * stride));
  return SamplePath(std::move(g), std::move(v));
}

double SamplePath::sup_norm() const {
  double m = 0.0;
  for (Eigen::Index k = 0; k < values_.cols(); ++k) m = std::max(m, values_.col(k).norm());
  return m;
}

namespace {

void check_window(const SamplePath& x, double p, std::size_t s, std::size_t t) {
  if (!(p >= 1.0)) throw std::invalid_argument("p-variation requires p >= 1");
  if (!(s < t) || t >= x.size()) throw std::invalid_argument("p-variation window must satisfy s < t <= last index");
}

double pow_norm(double norm, double p) {
  if (p == 1.0) return norm;
  if (p == 2.0) return norm * norm;
  return std::pow(norm, p);
}

}  // namespace

PVariation p_variation_argmax(const SamplePath& x, double p, std::size_t s, std::size_t t) {
  check_window(x, p, s, t);
  const std::size_t m = t - s + 1;
  std::vector<double> best(m, 0.0);
  std::vector<std::size_t> from(m, 0);
  for (std::size_t j = 1; j < m; ++j) {
    double b = -1.0;
    std::size_t arg = 0;
    const auto xj = x[s + j];
    for (std::size_t i = 0; i < j; ++i) {
      const double cand = best[i] + pow_norm((xj - x[s + i]).norm(), p);
      if (cand > b) {
        b = cand;
        arg = i;
      }
    }
    best[j] = b;
    from[j] = arg;
  }
  PVariation out;
  out.value = p == 1.0 ? best.back() : std::pow(best.back(), 1.0 / p);
  for (std::size_t j = m - 1;; j = from[j]) {
    out.dissection.push_back(s + j);
    if (j == 0) break;
  }
  std::reverse(out.dissection.begin(), out.dissection.end());
  return out;
}

double p_variation(const SamplePath& x, double p, std::size_t s, std::size_t t) {
  check_window(x, p, s, t);
  if (p == 1.0) {
    // Triangle inequality: the finest dissection is optimal.
    double sum = 0.0;
    for (std::size_t k = s; k < t; ++k) sum += x.increment(k, k + 1).norm();
    return sum;
  }
  const std::size_t m = t - s + 1;
  std::vector<double> best(m, 0.0);
  for (std::size_t j = 1; j < m; ++j) {
    double b = 0.0;
    const auto xj = x[s + j];
    for (std::size_t i = 0; i < j; ++i) b = std::max(b, best[i] + pow_norm((xj - x[s + i]).norm(), p));
    best[j] = b;
  }
  return std::pow(best.back(), 1.0 / p);
}

double p_variation(const SamplePath& x, double p) { return p_variation(x, p, 0, x.size() - 1); }

double two_parameter_variation_power(std::size_t s, std::size_t t, double q,
                                     const std::function<double(std::size_t, std::size_t)>& norm) {
  if (!(q > 0.0)) throw std::invalid_argument("variation exponent must be positive");
  if (!(s < t)) throw std::invalid_argument("variation window must satisfy s < t");
  const std::size_t m = t - s + 1;
  std::vector<double> best(m, 0.0);
  for (std::size_t j = 1; j < m; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) b = std::max(b, best[i] + pow_norm(norm(s + i, s + j), q));
    best[j] = b;
  }
  return best.back();
}

Matrix p_variation_control(const SamplePath& x, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("p-variation requires p >= 1");
  const auto n = static_cast<Eigen::Index>(x.size());
  Matrix w = Matrix::Zero(n, n);
  std::vector<double> best(x.size());
  for (std::size_t s = 0; s < x.size(); ++s) {
    best[s] = 0.0;
    for (std::size_t j = s + 1; j < x.size(); ++j) {
      double b = 0.0;
      for (std::size_t i = s; i < j; ++i) b = std::max(b, best[i] + pow_norm(x.increment(i, j).norm(), p));
      best[j] = b;
      w(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j)) = b;
    }
  }
  return w;
}

SuperadditivityReport check_control_superadditive(const Matrix& omega) {
  if (omega.rows() != omega.cols() || omega.rows() < 1)
    throw std::invalid_argument("control table must be square and nonempty");
  const Eigen::Index n = omega.rows();
  SuperadditivityReport rep;
  rep.tolerance = 1e-12 * (1.0 + std::abs(omega(0, n - 1)));
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < n; ++s)
    for (Eigen::Index u = s; u < n; ++u)
      for (Eigen::Index t = u; t < n; ++t) {
        const double v = omega(s, u) + omega(u, t) - omega(s, t);
        if (v > rep.worst_violation) {
          rep.worst_violation = v;
          rep.s = static_cast<std::size_t>(s);
          rep.u = static_cast<std::size_t>(u);
          rep.t = static_cast<std::size_t>(t);
        }
      }
  return rep;
}

SuperadditivityReport check_control_superadditive(
    std::size_t points, const std::function<double(std::size_t, std::size_t)>& omega) {
  const auto n = static_cast<Eigen::Index>(points);
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index s = 0; s < n; ++s)
    for (Eigen::Index t = s; t < n; ++t)
      w(s, t) = omega(static_cast<std::size_t>(s), static_cast<std::size_t>(t));
  return check_control_superadditive(w);
}

double valadier_l(double s, double S, int e) {
  if (!(s > 0.0)) throw std::invalid_argument("valadier_l requires s > 0");
  if (e < 1) throw std::invalid_argument("dimension must be >= 1");
  if (e == 1) return std::max(0.0, S - s);
  return std::max(0.0, (S * S - s * s) / (2.0 * s));
}

double bound_M_rho(int N, double rho, double diam_sup) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  return static_cast<double>(N) * diam_sup * diam_sup / (2.0 * rho);
}

double bound_M_NR(int N, double R, double gamma_sup, double x_sup, double phi_T) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("R must be positive");
  const double s = gamma_sup + x_sup + phi_T;
  return static_cast<double>(N) * s * s / R;
}

}  // namespace sweep
