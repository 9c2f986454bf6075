#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sweep/path.hpp"

namespace sweep {

/// Counter-based generator: the k-th draw of a stream is
/// splitmix64_mix(key + (k + 1) * golden_gamma), where the key of stream j is
/// splitmix64_mix(seed ^ splitmix64_mix(j + 1)). Normals come from Box-Muller
/// on consecutive pairs of 53-bit uniforms.
class CounterRng {
 public:
  static constexpr const char* kName = "splitmix64-counter/box-muller";

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  /// Uniform on (0, 1].
  double next_uniform();
  double next_normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z);

enum class FbmMethod { Hosking, Cholesky };

std::string to_string(FbmMethod m);
FbmMethod fbm_method_from_string(const std::string& s);

struct FbmSpec {
  double hurst = 0.5;
  double horizon = 1.0;
  std::size_t n = 256;
  int dims = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument unless H in (1/3, 1), T > 0, n >= 1, d >= 1.
  void validate() const;
};

/// 0.5 (|t|^{2H} + |s|^{2H} - |t - s|^{2H})
double fbm_covariance(double s, double t, double hurst);

/// Reusable sampler: Hosking precomputes the Durbin-Levinson partial
/// correlations of unit-step fractional Gaussian noise; Cholesky factors the
/// full covariance of (B(t_1), ..., B(t_n)) and is limited to n <= 1024.
class FbmSampler {
 public:
  explicit FbmSampler(const FbmSpec& spec, FbmMethod method = FbmMethod::Hosking);

  /// d independent components on the uniform grid, B(0) = 0; component j uses
  /// RNG stream j of `seed`.
  SamplePath sample(std::uint64_t seed) const;
  SamplePath sample() const { return sample(spec_.seed); }

  const FbmSpec& spec() const noexcept { return spec_; }
  FbmMethod method() const noexcept { return method_; }

 private:
  void sample_component(CounterRng& rng, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const;

  FbmSpec spec_;
  FbmMethod method_;
  Grid grid_;
  double step_scale_ = 1.0;          // (T/n)^H
  std::vector<double> partial_;      // Hosking: kappa_i
  std::vector<double> innov_sd_;     // Hosking: sqrt(v_i)
  Matrix chol_;                      // Cholesky factor
};

inline constexpr std::size_t kCholeskyMaxN = 1024;
inline constexpr double kCholeskyPivotMin = 1e-12;

SamplePath sample_fbm(const FbmSpec& spec, FbmMethod method = FbmMethod::Hosking);

/// W(t) = t e_1 + sum_k B_k(t) e_{k+1}
SamplePath build_time_space_signal(const SamplePath& b_path);

}  // namespace sweep
