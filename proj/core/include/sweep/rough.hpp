#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "sweep/path.hpp"

namespace sweep {

/// Level-2 lift of a sampled path: the base path plus, for each grid segment
/// k, the d x d matrix Z(t_k, t_{k+1}) with entries int z_i(t_k, r) dz_j(r).
class RoughLift {
 public:
  RoughLift(SamplePath base, std::vector<Matrix> segment_areas);

  const SamplePath& base() const noexcept { return base_; }
  const Grid& grid() const noexcept { return base_.grid(); }
  Eigen::Index dim() const noexcept { return base_.dim(); }
  const Matrix& segment_area(std::size_t k) const { return areas_[k]; }

  /// Z(s, t) by folding Chen's relation over the segments in [s, t].
  Matrix window_area(std::size_t s, std::size_t t) const;

 private:
  SamplePath base_;
  std::vector<Matrix> areas_;
};

/// Exact iterated integrals of the piecewise-linear interpolant:
/// Z(t_k, t_{k+1}) = dz_k dz_k^T / 2.
RoughLift lift_piecewise_linear(const SamplePath& z);

/// Z(s,u) + Z(u,t) + z(s,u) z(u,t)^T for grid indices s <= u <= t.
Matrix chen_combine(const RoughLift& lift, std::size_t s, std::size_t u, std::size_t t);

/// Left-point Riemann sums of y against z on the shared grid; the running
/// integral starts at 0. y holds e x d matrices, z is d-dimensional.
SamplePath young_integral(const MatrixPath& y, const SamplePath& z);
/// sum_{k=s}^{t-1} y(t_k) z(t_k, t_{k+1})
Vector young_increment(const MatrixPath& y, const SamplePath& z, std::size_t s, std::size_t t);

/// A path y with values in rows x cols matrices and Gubinelli derivative y'
/// relative to a reference lift of a d-dimensional path. The derivative at
/// t_k is stored as a rows x (cols * d) block matrix whose i-th block is
/// y'(t_k) e_i.
struct ControlledPath {
  std::vector<Matrix> value;
  std::vector<Matrix> derivative;
  std::shared_ptr<const RoughLift> reference;

  std::size_t size() const noexcept { return value.size(); }
  /// y'(t_k) applied to v in R^d.
  Matrix apply_derivative(std::size_t k, const Vector& v) const;
  /// R_y(s,t) = y(s,t) - y'(s) z(s,t)
  Matrix remainder(std::size_t s, std::size_t t) const;
  /// ||R_y||_{q-var} on [0, T] for q = p / 2 (power 1/q applied).
  double remainder_variation(double q) const;
};

/// Builds a controlled path over R^e from state samples and their
/// derivative matrices (e x d each).
ControlledPath make_controlled(const SamplePath& x, std::vector<Matrix> derivative,
                               std::shared_ptr<const RoughLift> reference);

/// Compensated left-point sums
/// sum y(t_k) z(t_k, t_{k+1}) + y'(t_k) Z(t_k, t_{k+1}); returns the running
/// integral in R^e. Throws std::invalid_argument if y.reference is not `lift`.
SamplePath rough_integral(const ControlledPath& y, const RoughLift& lift);

/// Smooth map phi : R^e -> e x d matrices with its Jacobian. The Jacobian is an
/// e x (d * e) block matrix whose k-th block is d phi / d x_k.
class VectorField {
 public:
  struct Bounds {
    double sup_value = 0.0;
    double sup_jacobian = 0.0;
    double lip_jacobian = 0.0;
  };

  VectorField(Eigen::Index state_dim, Eigen::Index driver_dim, std::function<Matrix(const Vector&)> value,
              std::function<Matrix(const Vector&)> jacobian, Bounds bounds);

  static VectorField zero(Eigen::Index e, Eigen::Index d);
  static VectorField constant(Matrix a);
  /// phi(x) = A + sum_k x_k B_k
  static VectorField affine(Matrix a, std::vector<Matrix> slopes);
  /// Scalar field phi(x) = amplitude cos(frequency x + phase), e = d = 1.
  static VectorField scalar_trig(double amplitude, double frequency, double phase);

  Matrix operator()(const Vector& x) const { return value_(x); }
  Matrix jacobian(const Vector& x) const { return jacobian_(x); }
  Eigen::Index state_dim() const noexcept { return e_; }
  Eigen::Index driver_dim() const noexcept { return d_; }
  const Bounds& bounds() const noexcept { return bounds_; }
  /// Lip-type norm used in remainder estimates: max of the three bounds.
  double lip_norm() const noexcept;

  /// max over `probes` random points of ||(phi(x + h v) - phi(x)) / h - Dphi(x) v||
  /// with unit v; points drawn in [-radius, radius]^e.
  double check_jacobian(int probes = 32, double h = 1e-5, double radius = 1.0, std::uint64_t seed = 7) const;

 private:
  Eigen::Index e_, d_;
  std::function<Matrix(const Vector&)> value_;
  std::function<Matrix(const Vector&)> jacobian_;
  Bounds bounds_;
};

/// phi(x) with derivative Dphi(x) x'; same reference lift.
ControlledPath compose_controlled(const VectorField& phi, const ControlledPath& x);

}  // namespace sweep
