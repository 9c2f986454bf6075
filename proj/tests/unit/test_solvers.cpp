#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "sweep/diagnostics.hpp"
#include "sweep/errors.hpp"
#include "sweep/fbm.hpp"
#include "sweep/solvers.hpp"

using namespace sweep;

namespace {

Vector s1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

MovingConvexSet half_line(double T) {
  return MovingConvexSet::constant(T, ConvexSet::box(s1(0), s1(INFINITY)), s1(1), 1);
}

PicardOptions opts_with_tol(double tol, std::size_t max_iter) {
  PicardOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  return o;
}

SamplePath scalar(const Grid& g, double (*f)(double)) {
  return SamplePath::sample(g, [f](double t) { return s1(f(t)); });
}

}  // namespace

TEST_SUITE("sweeping_solvers") {
  TEST_CASE("catching-up on a moving half-line") {
    const Grid g = Grid::uniform(1.0, 50);
    auto m = MovingConvexSet::translating(1.0, ConvexSet::box(s1(0), s1(INFINITY)), [](double t) { return s1(t); }, s1(1), 1);
    const auto run = catching_up(m, s1(0), g);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(run.Y[k][0] == g[k]);
    CHECK(p_variation(run.Y, 1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("catching-up with a static set keeps an interior start") {
    auto m = MovingConvexSet::constant(1.0, ConvexSet::ball(v2(0, 0), 1), v2(0, 0), 1);
    const auto run = catching_up(m, v2(0.2, 0.3), Grid::uniform(1.0, 10));
    for (std::size_t k = 0; k < 11; ++k) CHECK(run.X[k] == v2(0.2, 0.3));
  }

  TEST_CASE("catching-up on a moving ball, hand-computed") {
    auto m = MovingConvexSet::translating(
        1.0, ConvexSet::ball(v2(0, 0), 1), [](double t) { return v2(t, 0); }, v2(0, 0), 1);
    const Grid g = Grid::uniform(1.0, 4);
    const auto left = catching_up(m, v2(-1, 0), g);
    const double expect[] = {-1, -0.75, -0.5, -0.25, 0};
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(left.X[k][0] == doctest::Approx(expect[k]).epsilon(1e-15));
      CHECK(left.X[k][1] == 0.0);
    }
    const auto right = catching_up(m, v2(1, 0), g);
    for (std::size_t k = 0; k < 5; ++k) CHECK(right.X[k] == v2(1, 0));
  }

  TEST_CASE("infeasible start") {
    auto m = MovingConvexSet::constant(1.0, ConvexSet::ball(v2(0, 0), 1), v2(0, 0), 1);
    CHECK_THROWS_AS(catching_up(m, v2(2, 0), Grid::uniform(1, 4)), InfeasibleStart);
  }

  TEST_CASE("skorokhod on the half-line matches the explicit map") {
    const Grid g = Grid::uniform(1.0, 200);
    const auto h = scalar(g, [](double t) { return -t; });
    const auto run = skorokhod_decompose(half_line(1.0), s1(0.5), h);
    std::vector<double> hv(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) hv[k] = h[k][0];
    const auto w = oracle::half_line_reflection(0.5, hv);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(run.Y[k][0] == w[k]);
      CHECK(run.Y[k][0] == std::max(0.5, g[k]));
    }
    CHECK(feasibility_report(run, half_line(1.0)).max_violation == 0.0);
    CHECK(identity_defect(run) == 0.0);

    const auto run0 = skorokhod_decompose(half_line(1.0), s1(0), h);
    CHECK(p_variation(run0.Y, 1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("skorokhod with zero perturbation is catching-up") {
    auto m = MovingConvexSet::translating(
        1.0, ConvexSet::ball(v2(0, 0), 1), [](double t) { return v2(std::sin(3 * t), t); }, v2(0, 0), 1);
    const Grid g = Grid::uniform(1.0, 64);
    const auto a = skorokhod_decompose(m, v2(0.5, -0.5), SamplePath::zeros(g, 2));
    const auto b = catching_up(m, v2(0.5, -0.5), g);
    CHECK(a.X.values() == b.X.values());
    CHECK(a.Y.values() == b.Y.values());
  }

  TEST_CASE("interior perturbation is not reflected") {
    auto m = MovingConvexSet::constant(1.0, ConvexSet::ball(v2(0, 0), 1), v2(0, 0), 1);
    const Grid g = Grid::uniform(1.0, 100);
    const auto h = SamplePath::sample(g, [](double t) { return v2(0.5 * std::sin(6 * t), 0.3 * t); });
    const auto run = skorokhod_decompose(m, v2(0, 0), h);
    CHECK(run.Y.values().norm() == 0.0);
    CHECK(run.X.values() == h.values());
    CHECK_THROWS_AS(skorokhod_decompose(m, v2(0, 0), SamplePath::sample(g, [](double t) { return v2(1 + t, 0); })),
                    std::invalid_argument);
  }

  TEST_CASE("euler examples") {
    const Grid g = Grid::uniform(1.0, 40);
    auto box = MovingConvexSet::constant(1.0, ConvexSet::box(s1(-1), s1(2)), s1(0), 0.5);
    const auto zero_run = euler_catching_up(box, s1(0.5), VectorField::zero(1, 1), SamplePath::zeros(g, 1));
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(zero_run.X[k][0] == 0.5);

    const auto w = scalar(g, [](double t) { return std::sin(9 * t) - 0.5 * t; });
    const auto e = euler_catching_up(half_line(1.0), s1(0.2), VectorField::zero(1, 1), w);
    const auto s = skorokhod_decompose(half_line(1.0), s1(0.2), w);
    CHECK(e.X.values() == s.X.values());

    auto big = MovingConvexSet::constant(1.0, ConvexSet::box(s1(-1e6), s1(1e6)), s1(0), 1);
    const auto decay = euler_catching_up(big, s1(1), VectorField::affine(Matrix::Zero(1, 1), {-Matrix::Ones(1, 1)}),
                                         SamplePath::zeros(g, 1));
    const double dt = 1.0 / 40;
    for (std::size_t k = 0; k < g.size(); ++k)
      CHECK(decay.X[k][0] == doctest::Approx(std::pow(1 - dt, static_cast<double>(k))).epsilon(1e-13));
  }

  TEST_CASE("picard young reductions") {
    auto m = MovingConvexSet::translating(
        1.0, ConvexSet::box(v2(-1, -1), v2(1, 1)), [](double t) { return v2(t, 0); }, v2(0, 0), 1);
    const Grid g = Grid::uniform(1.0, 32);
    const auto z = SamplePath::sample(g, [](double t) { return v2(std::sin(2 * t), t * t); });
    const auto zero = picard_young(m, v2(-0.5, 0), VectorField::zero(2, 2), z);
    const auto cu = catching_up(m, v2(-0.5, 0), g);
    CHECK(zero.iterations == 1);
    CHECK(zero.X.values() == cu.X.values());

    Matrix a(2, 2);
    a << 0.1, 0.2, -0.3, 0.05;
    const auto c = picard_young(m, v2(-0.5, 0), VectorField::constant(a), z);
    CHECK(c.iterations == 2);
    CHECK(c.converged);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK((c.H[k] - a * z.increment(0, k)).norm() < 1e-15);
  }

  TEST_CASE("picard young against a fine reflected ODE") {
    const auto f = VectorField::scalar_trig(0.2, 1.0, 0.0);
    const Grid g = Grid::uniform(1.0, 512);
    const auto z = scalar(g, [](double t) { return t; });
    const auto run = picard_young(half_line(1.0), s1(0.0), f, z, opts_with_tol(1e-8, 200));
    CHECK(run.converged);
    const std::size_t fine_n = 1 << 16;
    const auto fine =
        euler_catching_up(half_line(1.0), s1(0.0), f, SamplePath::zeros(Grid::uniform(1.0, fine_n), 1));
    double gap = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) gap = std::max(gap, std::abs(run.X[k][0] - fine.X[k * 128][0]));
    CHECK(gap <= 5e-3);
  }

  TEST_CASE("picard rough reductions") {
    auto m = MovingConvexSet::constant(1.0, ConvexSet::box(v2(-1, -1), v2(1, 1)), v2(0, 0), 1);
    const Grid g = Grid::uniform(1.0, 64);
    const auto z = SamplePath::sample(g, [](double t) { return v2(std::sin(5 * t), std::cos(3 * t) - 1); });
    auto lift = std::make_shared<const RoughLift>(lift_piecewise_linear(z));
    const auto zero = picard_rough(m, v2(0.3, 0.3), VectorField::zero(2, 2), lift);
    CHECK(zero.iterations == 1);
    CHECK(zero.X.values() == catching_up(m, v2(0.3, 0.3), g).X.values());

    Matrix a(2, 2);
    a << 0.2, 0.0, 0.1, -0.3;
    const auto r = picard_rough(m, v2(0.3, 0.3), VectorField::constant(a), lift);
    const auto y = picard_young(m, v2(0.3, 0.3), VectorField::constant(a), z);
    CHECK((r.X.values() - y.X.values()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("picard rough with fractional driver refines consistently") {
    const FbmSpec spec{0.4, 1.0, 2048, 1, 12};
    const auto b = sample_fbm(spec);
    const auto f = VectorField::affine(Matrix::Constant(1, 1, 0.1), {Matrix::Constant(1, 1, 0.1)});
    auto m = MovingConvexSet::constant(1.0, ConvexSet::box(s1(0), s1(1)), s1(0.5), 0.5);
    std::vector<SweepingRun> runs;
    for (std::size_t n : {512, 1024, 2048}) {
      auto lift = std::make_shared<const RoughLift>(lift_piecewise_linear(b.subsample(2048 / n)));
      runs.push_back(picard_rough(m, s1(0.5), f, lift));
      CHECK(runs.back().converged);
      CHECK(identity_defect(runs.back()) == 0.0);
      CHECK(feasibility_report(runs.back(), m).max_violation <= kDefaultProjTol);
    }
    auto gap = [](const SweepingRun& c, const SweepingRun& f) {
      double g = 0.0;
      for (std::size_t k = 0; k < c.grid.size(); ++k) g = std::max(g, (c.X[k] - f.X[2 * k]).norm());
      return g;
    };
    const double g1 = gap(runs[0], runs[1]), g2 = gap(runs[1], runs[2]);
    MESSAGE("picard rough refinement gaps " << g1 << " " << g2);
    CHECK(g2 < g1);
  }

  TEST_CASE("picard non-convergence is reported") {
    const auto f = VectorField::scalar_trig(0.2, 1.0, 0.0);
    const Grid g = Grid::uniform(1.0, 64);
    const auto run = picard_young(half_line(1.0), s1(0.0), f, scalar(g, [](double t) { return t; }),
                                  opts_with_tol(1e-30, 3));
    CHECK_FALSE(run.converged);
    CHECK(run.iterations == 3);
  }

  TEST_CASE("scheme names round-trip") {
    for (auto s : {Scheme::CatchingUp, Scheme::Skorokhod, Scheme::Euler, Scheme::PicardYoung, Scheme::PicardRough})
      CHECK(scheme_from_string(to_string(s)) == s);
    CHECK_THROWS(scheme_from_string("implicit"));
  }
}
