#include "sweep/rough.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "sweep/errors.hpp"

namespace sweep {

RoughLift::RoughLift(SamplePath base, std::vector<Matrix> segment_areas)
    : base_(std::move(base)), areas_(std::move(segment_areas)) {
  if (areas_.size() != base_.grid().steps())
    throw std::invalid_argument("rough lift needs one area matrix per grid segment");
  for (const auto& a : areas_)
    if (a.rows() != base_.dim() || a.cols() != base_.dim())
      throw std::invalid_argument("rough lift area matrices must be d x d");
}

Matrix RoughLift::window_area(std::size_t s, std::size_t t) const {
  if (s > t || t >= base_.size()) throw std::invalid_argument("window_area requires s <= t within the grid");
  const Eigen::Index d = dim();
  Matrix area = Matrix::Zero(d, d);
  Vector acc = Vector::Zero(d);
  for (std::size_t k = s; k < t; ++k) {
    const Vector dz = base_.increment(k, k + 1);
    area += areas_[k] + acc * dz.transpose();
    acc += dz;
  }
  return area;
}

RoughLift lift_piecewise_linear(const SamplePath& z) {
  std::vector<Matrix> areas;
  areas.reserve(z.grid().steps());
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    const Vector dz = z.increment(k, k + 1);
    areas.emplace_back(0.5 * dz * dz.transpose());
  }
  return RoughLift(z, std::move(areas));
}

Matrix chen_combine(const RoughLift& lift, std::size_t s, std::size_t u, std::size_t t) {
  if (!(s <= u && u <= t) || t >= lift.base().size()) throw std::invalid_argument("chen_combine requires s <= u <= t");
  return lift.window_area(s, u) + lift.window_area(u, t) +
         lift.base().increment(s, u) * lift.base().increment(u, t).transpose();
}

namespace {

void check_integrand(const MatrixPath& y, const SamplePath& z) {
  require_same_grid(y.grid, z.grid(), "young_integral");
  if (y.values.size() != z.size()) throw std::invalid_argument("integrand has the wrong number of samples");
  for (const auto& m : y.values)
    if (m.cols() != z.dim()) throw std::invalid_argument("integrand columns must match the driver dimension");
}

}  // namespace

SamplePath young_integral(const MatrixPath& y, const SamplePath& z) {
  check_integrand(y, z);
  const Eigen::Index e = y.values.front().rows();
  Matrix out(e, static_cast<Eigen::Index>(z.size()));
  out.col(0).setZero();
  Vector acc = Vector::Zero(e);
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    const Vector dz = z.increment(k, k + 1);
    const Vector incr = y.values[k] * dz;
    acc += incr;
    out.col(static_cast<Eigen::Index>(k + 1)) = acc;
  }
  return SamplePath(z.grid(), std::move(out));
}

Vector young_increment(const MatrixPath& y, const SamplePath& z, std::size_t s, std::size_t t) {
  check_integrand(y, z);
  if (s > t || t >= z.size()) throw std::invalid_argument("young_increment window out of range");
  Vector acc = Vector::Zero(y.values.front().rows());
  for (std::size_t k = s; k < t; ++k) acc += y.values[k] * z.increment(k, k + 1);
  return acc;
}

Matrix ControlledPath::apply_derivative(std::size_t k, const Vector& v) const {
  const Eigen::Index cols = value[k].cols();
  Matrix out = Matrix::Zero(value[k].rows(), cols);
  for (Eigen::Index i = 0; i < v.size(); ++i) out += v[i] * derivative[k].middleCols(i * cols, cols);
  return out;
}

Matrix ControlledPath::remainder(std::size_t s, std::size_t t) const {
  return value[t] - value[s] - apply_derivative(s, reference->base().increment(s, t));
}

double ControlledPath::remainder_variation(double q) const {
  if (size() < 2) return 0.0;
  const double power =
      two_parameter_variation_power(0, size() - 1, q, [this](std::size_t s, std::size_t t) { return remainder(s, t).norm(); });
  return std::pow(power, 1.0 / q);
}

ControlledPath make_controlled(const SamplePath& x, std::vector<Matrix> derivative,
                               std::shared_ptr<const RoughLift> reference) {
  if (!reference) throw std::invalid_argument("controlled path needs a reference lift");
  require_same_grid(x.grid(), reference->grid(), "make_controlled");
  if (derivative.size() != x.size()) throw std::invalid_argument("derivative needs one matrix per grid point");
  ControlledPath cp;
  cp.value.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    cp.value.emplace_back(x[k]);
    if (derivative[k].rows() != x.dim() || derivative[k].cols() != reference->dim())
      throw std::invalid_argument("state derivative must be e x d");
  }
  cp.derivative = std::move(derivative);
  cp.reference = std::move(reference);
  return cp;
}

SamplePath rough_integral(const ControlledPath& y, const RoughLift& lift) {
  if (!y.reference) throw std::invalid_argument("controlled path has no reference lift");
  if (y.reference.get() != &lift) {
    require_same_grid(y.reference->grid(), lift.grid(), "rough_integral");
    if (y.reference->base().values() != lift.base().values())
      throw std::invalid_argument("rough_integral: controlled path refers to a different lift");
  }
  const SamplePath& z = lift.base();
  if (y.size() != z.size() || y.derivative.size() != z.size())
    throw std::invalid_argument("rough_integral: integrand has the wrong number of samples");
  const Eigen::Index e = y.value.front().rows();
  const Eigen::Index d = z.dim();
  Matrix out(e, static_cast<Eigen::Index>(z.size()));
  out.col(0).setZero();
  Vector acc = Vector::Zero(e);
  for (std::size_t k = 0; k + 1 < z.size(); ++k) {
    const Vector dz = z.increment(k, k + 1);
    Vector incr = y.value[k] * dz;
    const Matrix& area = lift.segment_area(k);
    const Matrix& der = y.derivative[k];
    if (!der.isZero(0.0)) {
      Vector comp = Vector::Zero(e);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) comp += area(i, j) * der.col(i * d + j);
      incr += comp;
    }
    acc += incr;
    out.col(static_cast<Eigen::Index>(k + 1)) = acc;
  }
  return SamplePath(z.grid(), std::move(out));
}

// -- VectorField ------------------------------------------------------------

VectorField::VectorField(Eigen::Index state_dim, Eigen::Index driver_dim, std::function<Matrix(const Vector&)> value,
                         std::function<Matrix(const Vector&)> jacobian, Bounds bounds)
    : e_(state_dim), d_(driver_dim), value_(std::move(value)), jacobian_(std::move(jacobian)), bounds_(bounds) {
  if (e_ < 1 || d_ < 1) throw std::invalid_argument("vector field dimensions must be positive");
  if (!value_ || !jacobian_) throw std::invalid_argument("vector field needs value and jacobian");
  if (!std::isfinite(bounds_.sup_value) || !std::isfinite(bounds_.sup_jacobian) || !std::isfinite(bounds_.lip_jacobian))
    throw std::invalid_argument("vector field bounds must be finite");
}

VectorField VectorField::zero(Eigen::Index e, Eigen::Index d) {
  return VectorField(
      e, d, [e, d](const Vector&) { return Matrix::Zero(e, d); }, [e, d](const Vector&) { return Matrix::Zero(e, d * e); },
      {});
}

VectorField VectorField::constant(Matrix a) {
  const Eigen::Index e = a.rows(), d = a.cols();
  const double n = a.norm();
  return VectorField(
      e, d, [a](const Vector&) { return a; }, [e, d](const Vector&) { return Matrix::Zero(e, d * e); }, {n, 0.0, 0.0});
}

VectorField VectorField::affine(Matrix a, std::vector<Matrix> slopes) {
  const Eigen::Index e = a.rows(), d = a.cols();
  if (static_cast<Eigen::Index>(slopes.size()) != e) throw std::invalid_argument("affine field needs one slope per state coordinate");
  Matrix jac(e, d * e);
  double slope_norm2 = 0.0;
  for (Eigen::Index k = 0; k < e; ++k) {
    const Matrix& b = slopes[static_cast<std::size_t>(k)];
    if (b.rows() != e || b.cols() != d) throw std::invalid_argument("affine slopes must match the constant term shape");
    jac.middleCols(k * d, d) = b;
    slope_norm2 += b.squaredNorm();
  }
  // Value bound declared on the unit ball of the state space.
  const Bounds bounds{a.norm() + std::sqrt(slope_norm2), std::sqrt(slope_norm2), 0.0};
  return VectorField(
      e, d,
      [a, slopes = std::move(slopes)](const Vector& x) {
        Matrix v = a;
        for (Eigen::Index k = 0; k < x.size(); ++k) v += x[k] * slopes[static_cast<std::size_t>(k)];
        return v;
      },
      [jac](const Vector&) { return jac; }, bounds);
}

VectorField VectorField::scalar_trig(double amplitude, double frequency, double phase) {
  const double a = std::abs(amplitude), w = std::abs(frequency);
  return VectorField(
      1, 1, [=](const Vector& x) { return Matrix::Constant(1, 1, amplitude * std::cos(frequency * x[0] + phase)); },
      [=](const Vector& x) { return Matrix::Constant(1, 1, -amplitude * frequency * std::sin(frequency * x[0] + phase)); },
      {a, a * w, a * w * w});
}

double VectorField::lip_norm() const noexcept {
  return std::max({bounds_.sup_value, bounds_.sup_jacobian, bounds_.lip_jacobian});
}

double VectorField::check_jacobian(int probes, double h, double radius, std::uint64_t seed) const {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-radius, radius);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    Vector x(e_), v(e_);
    for (Eigen::Index i = 0; i < e_; ++i) {
      x[i] = unif(gen);
      v[i] = normal(gen);
    }
    v.normalize();
    const Matrix fd = (value_(x + h * v) - value_(x)) / h;
    const Matrix jac = jacobian_(x);
    Matrix dir = Matrix::Zero(e_, d_);
    for (Eigen::Index k = 0; k < e_; ++k) dir += v[k] * jac.middleCols(k * d_, d_);
    worst = std::max(worst, (fd - dir).norm());
  }
  return worst;
}

ControlledPath compose_controlled(const VectorField& phi, const ControlledPath& x) {
  if (!x.reference) throw std::invalid_argument("controlled path has no reference lift");
  const Eigen::Index e = phi.state_dim(), d = phi.driver_dim();
  const Eigen::Index dz = x.reference->dim();
  ControlledPath out;
  out.reference = x.reference;
  out.value.reserve(x.size());
  out.derivative.reserve(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Vector xk = x.value[k].col(0);
    if (xk.size() != e) throw std::invalid_argument("compose_controlled: state dimension mismatch");
    out.value.push_back(phi(xk));
    const Matrix jac = phi.jacobian(xk);
    Matrix der = Matrix::Zero(e, d * dz);
    for (Eigen::Index i = 0; i < dz; ++i) {
      // x'(t_k) e_i is the i-th column of the state derivative.
      const auto xi = x.derivative[k].col(i);
      for (Eigen::Index c = 0; c < e; ++c)
        if (xi[c] != 0.0) der.middleCols(i * d, d) += xi[c] * jac.middleCols(c * d, d);
    }
    out.derivative.push_back(std::move(der));
  }
  return out;
}

}  // namespace sweep
