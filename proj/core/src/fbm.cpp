#include "sweep/fbm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sweep/errors.hpp"

namespace sweep {

// -- RNG --------------------------------------------------------------------

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64_mix(seed ^ splitmix64_mix(stream + 1))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64_mix(key_ + (++counter_) * kGolden); }

double CounterRng::next_uniform() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  cached_ = rad * std::sin(ang);
  has_cached_ = true;
  return rad * std::cos(ang);
}

// -- FbmSpec ---------------------------------------------------------------

std::string to_string(FbmMethod m) { return m == FbmMethod::Hosking ? "hosking" : "cholesky"; }

FbmMethod fbm_method_from_string(const std::string& s) {
  if (s == "hosking") return FbmMethod::Hosking;
  if (s == "cholesky") return FbmMethod::Cholesky;
  throw std::invalid_argument("unknown fBm method '" + s + "' (expected hosking or cholesky)");
}

void FbmSpec::validate() const {
  if (!(hurst > 1.0 / 3.0 && hurst < 1.0)) throw std::invalid_argument("Hurst parameter must lie in (1/3, 1)");
  if (!(horizon > 0.0)) throw std::invalid_argument("fBm horizon must be positive");
  if (n < 1) throw std::invalid_argument("fBm grid needs n >= 1");
  if (dims < 1) throw std::invalid_argument("fBm needs at least one dimension");
}

double fbm_covariance(double s, double t, double hurst) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(t), h2) + std::pow(std::abs(s), h2) - std::pow(std::abs(t - s), h2));
}

// -- sampler ----------------------------------------------------------------

FbmSampler::FbmSampler(const FbmSpec& spec, FbmMethod method)
    : spec_(spec), method_(method), grid_(Grid::uniform(spec.horizon, spec.n)) {
  spec_.validate();
  const std::size_t n = spec_.n;
  if (method_ == FbmMethod::Hosking) {
    step_scale_ = std::pow(spec_.horizon / static_cast<double>(n), spec_.hurst);
    // Autocovariance of unit-step fractional Gaussian noise.
    const double h2 = 2.0 * spec_.hurst;
    std::vector<double> gamma(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double kk = static_cast<double>(k);
      gamma[k] = 0.5 * (std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) + std::pow(std::abs(kk - 1.0), h2));
    }
    partial_.assign(n, 0.0);
    innov_sd_.assign(n, 0.0);
    std::vector<double> phi(n, 0.0), next(n, 0.0);
    double v = gamma[0];
    innov_sd_[0] = std::sqrt(v);
    for (std::size_t i = 1; i < n; ++i) {
      double num = gamma[i];
      for (std::size_t j = 1; j < i; ++j) num -= phi[j] * gamma[i - j];
      const double kappa = num / v;
      for (std::size_t j = 1; j < i; ++j) next[j] = phi[j] - kappa * phi[i - j];
      next[i] = kappa;
      std::swap(phi, next);
      v *= (1.0 - kappa * kappa);
      if (!(v > 0.0)) throw CovarianceNotPD("Hosking recursion produced a nonpositive innovation variance");
      partial_[i] = kappa;
      innov_sd_[i] = std::sqrt(v);
    }
  } else {
    if (n > kCholeskyMaxN)
      throw std::invalid_argument("Cholesky fBm sampling is limited to n <= " + std::to_string(kCholeskyMaxN));
    const auto nn = static_cast<Eigen::Index>(n);
    chol_ = Matrix::Zero(nn, nn);
    for (Eigen::Index i = 0; i < nn; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) {
        double s = fbm_covariance(grid_[static_cast<std::size_t>(i + 1)], grid_[static_cast<std::size_t>(j + 1)], spec_.hurst);
        for (Eigen::Index k = 0; k < j; ++k) s -= chol_(i, k) * chol_(j, k);
        if (i == j) {
          if (s < kCholeskyPivotMin)
            throw CovarianceNotPD("fBm covariance pivot " + std::to_string(s) + " at index " + std::to_string(i));
          chol_(i, i) = std::sqrt(s);
        } else {
          chol_(i, j) = s / chol_(j, j);
        }
      }
    }
  }
}

void FbmSampler::sample_component(CounterRng& rng, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) const {
  const std::size_t n = spec_.n;
  out[0] = 0.0;
  if (method_ == FbmMethod::Cholesky) {
    Vector xi(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = rng.next_normal();
    const Vector b = chol_.triangularView<Eigen::Lower>() * xi;
    out.tail(static_cast<Eigen::Index>(n)) = b.transpose();
    return;
  }
  // Hosking: predict each noise value from its past, add the innovation.
  std::vector<double> noise(n), phi(n, 0.0), next(n, 0.0);
  noise[0] = innov_sd_[0] * rng.next_normal();
  for (std::size_t i = 1; i < n; ++i) {
    const double kappa = partial_[i];
    for (std::size_t j = 1; j < i; ++j) next[j] = phi[j] - kappa * phi[i - j];
    next[i] = kappa;
    std::swap(phi, next);
    double mean = 0.0;
    for (std::size_t j = 1; j <= i; ++j) mean += phi[j] * noise[i - j];
    noise[i] = mean + innov_sd_[i] * rng.next_normal();
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += noise[i];
    out[static_cast<Eigen::Index>(i + 1)] = step_scale_ * acc;
  }
}

SamplePath FbmSampler::sample(std::uint64_t seed) const {
  Matrix values(spec_.dims, static_cast<Eigen::Index>(spec_.n + 1));
  for (int j = 0; j < spec_.dims; ++j) {
    CounterRng rng(seed, static_cast<std::uint64_t>(j));
    sample_component(rng, values.row(j));
  }
  return SamplePath(grid_, std::move(values));
}

SamplePath sample_fbm(const FbmSpec& spec, FbmMethod method) { return FbmSampler(spec, method).sample(); }

SamplePath build_time_space_signal(const SamplePath& b_path) {
  Matrix v(b_path.dim() + 1, static_cast<Eigen::Index>(b_path.size()));
  for (std::size_t k = 0; k < b_path.size(); ++k) {
    v(0, static_cast<Eigen::Index>(k)) = b_path.grid()[k];
    v.col(static_cast<Eigen::Index>(k)).tail(b_path.dim()) = b_path[k];
  }
  return SamplePath(b_path.grid(), std::move(v));
}

}  // namespace sweep
