#pragma once

#include <optional>
#include <string>

#include "sweep/geometry.hpp"
#include "sweep/rough.hpp"

namespace sweep {

enum class Scheme { CatchingUp, Skorokhod, Euler, PicardYoung, PicardRough };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

/// Solver output. X = H + Y holds exactly at every grid point because X is
/// always assembled as H + Y.
struct SweepingRun {
  Grid grid;
  SamplePath X;
  SamplePath H;
  SamplePath Y;
  std::size_t iterations = 0;
  bool converged = true;
  Scheme scheme = Scheme::CatchingUp;
  /// Sup distance between the last two Picard iterates (0 otherwise).
  double last_update = 0.0;
  /// Picard schemes: f(X(t_k)) on the grid, and the driver z, so that
  /// remainders X(u,t) - f(X(u)) z(u,t) can be formed downstream.
  std::optional<MatrixPath> integrand;
  std::optional<SamplePath> driver;
};

struct PicardOptions {
  double tol = 1e-8;
  std::size_t max_iter = 200;
  double proj_tol = kDefaultProjTol;
  /// Replaces the catching-up initialization X_0.
  std::optional<SamplePath> initial_guess;
};

/// Y_0 = a, Y_{k+1} = p_{C(t_{k+1})}(Y_k); H = 0, X = Y.
/// Throws InfeasibleStart if distance(C(0), a) > proj_tol.
SweepingRun catching_up(const MovingConvexSet& m, const Vector& a, const Grid& grid,
                        double proj_tol = kDefaultProjTol);

/// w_0 = a, w_{k+1} = p_{C(t_{k+1}) - h(t_{k+1})}(w_k); Y = w, H = h, X = h + w.
/// Requires h(0) = 0.
SweepingRun skorokhod_decompose(const MovingConvexSet& m, const Vector& a, const SamplePath& h,
                                double proj_tol = kDefaultProjTol);

/// X_{k+1} = p_{C(t_{k+1})}(X_k + f(X_k) dt_k + W(t_k, t_{k+1})) with the drift
/// field f (values e x 1) and additive signal W (W(0) = 0). Evaluated in the
/// equivalent reflected form Y_{k+1} = p_{C(t_{k+1}) - H_{k+1}}(Y_k) with
/// H_k = sum_{i<k} f(X_i) dt_i + W(t_k).
SweepingRun euler_catching_up(const MovingConvexSet& m, const Vector& a, const VectorField& drift,
                              const SamplePath& W, double proj_tol = kDefaultProjTol);

/// Picard iteration H_n = int f(X_{n-1}) dz (Young), (X_n, Y_n) = Skorokhod(H_n),
/// until sup |X_n - X_{n-1}| < tol. Non-convergence is reported, not thrown.
SweepingRun picard_young(const MovingConvexSet& m, const Vector& a, const VectorField& f, const SamplePath& z,
                         const PicardOptions& opts = {});

/// Same with rough integrals against `lift`: X_{n-1} is controlled with
/// derivative f(X_{n-2}) (zero for X_0), composed with f and integrated with
/// compensated sums.
SweepingRun picard_rough(const MovingConvexSet& m, const Vector& a, const VectorField& f,
                         std::shared_ptr<const RoughLift> lift, const PicardOptions& opts = {});

}  // namespace sweep
