// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's algorithms.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Exact projection onto { x : N x <= b } by enumerating active sets of size
/// 1..dim: project onto each affine face, keep feasible candidates, take the
/// nearest. Exponential, fine for a handful of facets.
inline Vec polytope_projection(const Mat& N, const Vec& b, const Vec& x, double feas_tol = 1e-9) {
  const int m = static_cast<int>(N.rows());
  const int e = static_cast<int>(N.cols());
  if (((N * x) - b).maxCoeff() <= 0.0) return x;
  Vec best;
  double best_d = std::numeric_limits<double>::infinity();
  std::vector<int> idx;
  std::function<void(int)> rec = [&](int start) {
    if (!idx.empty()) {
      Mat A(idx.size(), e);
      Vec c(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) {
        A.row(static_cast<Eigen::Index>(i)) = N.row(idx[i]);
        c[static_cast<Eigen::Index>(i)] = b[idx[i]];
      }
      const Mat G = A * A.transpose();
      Eigen::FullPivLU<Mat> lu(G);
      if (lu.rank() == G.rows()) {
        const Vec z = x - A.transpose() * lu.solve(A * x - c);
        if (((N * z) - b).maxCoeff() <= feas_tol) {
          const double d = (z - x).norm();
          if (d < best_d) {
            best_d = d;
            best = z;
          }
        }
      }
    }
    if (static_cast<int>(idx.size()) == e) return;
    for (int i = start; i < m; ++i) {
      idx.push_back(i);
      rec(i + 1);
      idx.pop_back();
    }
  };
  rec(0);
  return best;
}

/// p-variation by enumerating every dissection of the index set (2^(n-2) of them).
inline double pvar_bruteforce(const std::vector<Vec>& x, double p, std::vector<std::size_t>* arg = nullptr) {
  const std::size_t n = x.size();
  const std::size_t inner = n - 2;
  double best = 0.0;
  for (unsigned long mask = 0; mask < (1UL << inner); ++mask) {
    std::vector<std::size_t> pts{0};
    for (std::size_t i = 0; i < inner; ++i)
      if (mask & (1UL << i)) pts.push_back(i + 1);
    pts.push_back(n - 1);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) s += std::pow((x[pts[i + 1]] - x[pts[i]]).norm(), p);
    if (s > best) {
      best = s;
      if (arg) *arg = pts;
    }
  }
  return std::pow(best, 1.0 / p);
}

/// Hausdorff distance between two polygons given by boundary samples.
inline double hausdorff_mesh(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  auto one_sided = [](const std::vector<Vec>& p, const std::vector<Vec>& q) {
    double worst = 0.0;
    for (const auto& u : p) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& v : q) nearest = std::min(nearest, (u - v).norm());
      worst = std::max(worst, nearest);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

/// Points on the boundary of the rectangle [lo, hi] with spacing about h.
inline std::vector<Vec> rectangle_boundary(const Vec& lo, const Vec& hi, double h) {
  std::vector<Vec> pts;
  const int nx = static_cast<int>(std::ceil((hi[0] - lo[0]) / h));
  const int ny = static_cast<int>(std::ceil((hi[1] - lo[1]) / h));
  for (int i = 0; i <= nx; ++i) {
    const double x = lo[0] + (hi[0] - lo[0]) * i / nx;
    pts.push_back((Vec(2) << x, lo[1]).finished());
    pts.push_back((Vec(2) << x, hi[1]).finished());
  }
  for (int j = 0; j <= ny; ++j) {
    const double y = lo[1] + (hi[1] - lo[1]) * j / ny;
    pts.push_back((Vec(2) << lo[0], y).finished());
    pts.push_back((Vec(2) << hi[0], y).finished());
  }
  return pts;
}

/// int_s^t (z(r) - z(s)) (x) dz(r) for the piecewise-linear interpolation of
/// the given vertices, by midpoint quadrature with `sub` points per segment.
inline Mat iterated_integral_quadrature(const std::vector<Vec>& z, std::size_t s, std::size_t t, int sub) {
  const Eigen::Index d = z.front().size();
  Mat acc = Mat::Zero(d, d);
  for (std::size_t k = s; k < t; ++k) {
    const Vec dz = z[k + 1] - z[k];
    for (int j = 0; j < sub; ++j) {
      const double theta = (j + 0.5) / sub;
      const Vec zr = z[k] + theta * dz - z[s];
      acc += zr * dz.transpose() / sub;
    }
  }
  return acc;
}

/// One-sided reflection of h at the lower barrier 0 started from a >= 0:
/// w(t_k) = max(a, max_{j <= k} -h(t_j)).
inline std::vector<double> half_line_reflection(double a, const std::vector<double>& h) {
  std::vector<double> w(h.size());
  double run = a;
  for (std::size_t k = 0; k < h.size(); ++k) {
    run = std::max(run, -h[k]);
    w[k] = run;
  }
  return w;
}

/// Sample covariance and its standard error from paired samples.
struct CovEstimate {
  double cov;
  double stderr_;
};
inline CovEstimate sample_covariance(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  std::vector<double> prod(x.size());
  double c = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    prod[i] = (x[i] - mx) * (y[i] - my);
    c += prod[i];
  }
  c /= (n - 1);
  double v = 0;
  for (double p : prod) v += (p - c) * (p - c);
  v /= (n - 1);
  return {c, std::sqrt(v / n)};
}

}  // namespace oracle
