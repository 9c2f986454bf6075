#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sweep/path.hpp"

using namespace sweep;

namespace {

SamplePath scalar_path(std::vector<double> vals) {
  Matrix v(1, static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(0, static_cast<Eigen::Index>(i)) = vals[i];
  return SamplePath(Grid::uniform(1.0, vals.size() - 1), v);
}

SamplePath random_path(std::mt19937_64& rng, Eigen::Index d, std::size_t n) {
  std::normal_distribution<double> g;
  Matrix v(d, static_cast<Eigen::Index>(n + 1));
  v.col(0).setZero();
  for (Eigen::Index k = 1; k <= static_cast<Eigen::Index>(n); ++k)
    for (Eigen::Index i = 0; i < d; ++i) v(i, k) = v(i, k - 1) + g(rng);
  return SamplePath(Grid::uniform(1.0, n), v);
}

std::vector<oracle::Vec> columns(const SamplePath& x) {
  std::vector<oracle::Vec> out;
  for (std::size_t k = 0; k < x.size(); ++k) out.emplace_back(x[k]);
  return out;
}

}  // namespace

TEST_SUITE("path_algebra") {
  TEST_CASE("grid construction") {
    const Grid g = Grid::uniform(2.0, 3);
    CHECK(g.size() == 4);
    CHECK(g.horizon() == 2.0);
    CHECK(g.subsample(3).steps() == 1);
    CHECK_THROWS_AS(Grid({0.0, 0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(Grid({0.1, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(g.subsample(2), std::invalid_argument);
  }

  TEST_CASE("p-variation examples") {
    const SamplePath x = scalar_path({0, 1, 0});
    CHECK(p_variation(x, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p_variation(x, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p_variation(scalar_path({0, 1, 3}), 1.0) == doctest::Approx(3.0));
    const auto arg = p_variation_argmax(x, 2.0, 0, 2);
    CHECK(arg.dissection == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("dynamic programme matches dissection enumeration") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 40; ++trial) {
      const SamplePath x = random_path(rng, 1 + trial % 3, 9 + trial % 5);
      const auto cols = columns(x);
      for (double p : {1.0, 1.5, 2.0, 2.5, 3.7}) {
        std::vector<std::size_t> arg;
        const double brute = oracle::pvar_bruteforce(cols, p, &arg);
        const PVariation pv = p_variation_argmax(x, p, 0, x.size() - 1);
        CHECK(pv.value == doctest::Approx(brute).epsilon(1e-12));
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < pv.dissection.size(); ++i)
          s += std::pow((x[pv.dissection[i + 1]] - x[pv.dissection[i]]).norm(), p);
        CHECK(std::pow(s, 1.0 / p) == doctest::Approx(brute).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("window p-variation") {
    std::mt19937_64 rng(1);
    const SamplePath x = random_path(rng, 2, 12);
    const auto cols = columns(x);
    std::vector<oracle::Vec> window(cols.begin() + 3, cols.begin() + 10);
    CHECK(p_variation(x, 2.2, 3, 9) == doctest::Approx(oracle::pvar_bruteforce(window, 2.2)).epsilon(1e-12));
    CHECK_THROWS_AS(p_variation(x, 2.0, 4, 4), std::invalid_argument);
  }

  TEST_CASE("monotone in p") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
      const SamplePath x = random_path(rng, 2, 40);
      double prev = INFINITY;
      for (double p : {1.0, 1.3, 2.0, 2.7, 4.0}) {
        const double v = p_variation(x, p);
        CHECK(v <= prev * (1 + 1e-12));
        prev = v;
      }
    }
  }

  TEST_CASE("control functions and super-additivity") {
    const std::size_t n = 20;
    const Grid g = Grid::uniform(1.0, n);
    const auto lin = check_control_superadditive(n + 1, [&](std::size_t s, std::size_t t) { return g[t] - g[s]; });
    CHECK(lin.satisfied());
    CHECK(lin.worst_violation <= lin.tolerance);

    std::mt19937_64 rng(4);
    const SamplePath x = random_path(rng, 2, n);
    for (double p : {1.0, 2.0, 3.0}) {
      const Matrix omega = p_variation_control(x, p);
      CHECK(check_control_superadditive(omega).satisfied());
      CHECK(std::pow(omega(0, n), 1.0 / p) == doctest::Approx(p_variation(x, p)).epsilon(1e-12));
    }

    const auto sq = check_control_superadditive(n + 1, [&](std::size_t s, std::size_t t) { return std::sqrt(g[t] - g[s]); });
    CHECK_FALSE(sq.satisfied());
    CHECK(sq.worst_violation > 0.1);
  }

  TEST_CASE("two-parameter variation of a true increment") {
    std::mt19937_64 rng(2);
    const SamplePath x = random_path(rng, 1, 10);
    const double two = two_parameter_variation_power(0, 10, 2.0, [&](std::size_t s, std::size_t t) {
      return x.increment(s, t).norm();
    });
    CHECK(two == doctest::Approx(std::pow(p_variation(x, 2.0), 2.0)).epsilon(1e-12));
  }

  TEST_CASE("explicit bounds") {
    CHECK(valadier_l(1, 3, 2) == doctest::Approx(4.0));
    CHECK(valadier_l(1, 1, 3) == 0.0);
    CHECK(valadier_l(1, 1, 1) == 0.0);
    CHECK(valadier_l(1, 3, 1) == doctest::Approx(2.0));
    CHECK(bound_M_rho(1, 0.5, 2) == doctest::Approx(4.0));
    CHECK(bound_M_rho(1, 0.5, 0) == 0.0);
    CHECK(bound_M_rho(3, 1, 1) == doctest::Approx(1.5));
    CHECK(bound_M_NR(1, 1, 0.5, 1.0, 0.5) == doctest::Approx(4.0));
    CHECK(bound_M_NR(1, 1, 0, 0, 0) == 0.0);
    CHECK(bound_M_NR(2, 4, 1.0, 0.5, 0.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(bound_M_rho(1, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(bound_M_NR(0, 1, 1, 1, 1), std::invalid_argument);
  }
}
