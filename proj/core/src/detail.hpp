#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "gdesc/common.hpp"

namespace gdesc::detail {

inline double lp_power_objective(const Vector& r, double p) {
  double s = 0.0;
  for (int i = 0; i < r.size(); ++i) s += std::pow(std::abs(r[i]), p);
  return s / p;
}

// Coefficients minimizing (1/p) || f0 - phi c ||_p^p over the span.
// p = 2 reduces to least squares; otherwise Barzilai-Borwein steps with an
// Armijo guard drive the gradient below inner_tol (scaled by the initial
// gradient magnitude).
inline Vector lp_span_min(const Vector& f0, const Matrix& phi, double p,
                          double inner_tol, Vector c) {
  if (p == 2.0) return phi.completeOrthogonalDecomposition().solve(f0);
  if (c.size() != phi.cols()) c = Vector::Zero(phi.cols());

  auto grad_at = [&](const Vector& cc) -> Vector {
    Vector r = f0 - phi * cc;
    Vector s(r.size());
    for (int i = 0; i < r.size(); ++i)
      s[i] = r[i] == 0.0
                 ? 0.0
                 : std::copysign(std::pow(std::abs(r[i]), p - 1.0), r[i]);
    return -(phi.transpose() * s);
  };

  double obj = lp_power_objective(f0 - phi * c, p);
  Vector g = grad_at(c);
  double tol = inner_tol * std::max(1.0, g.lpNorm<Eigen::Infinity>());
  double alpha = 1.0 / std::max(1.0, phi.squaredNorm());
  Vector c_prev, g_prev;

  const int cap = 10000;
  for (int it = 0; it < cap; ++it) {
    double gi = g.lpNorm<Eigen::Infinity>();
    if (gi <= tol) return c;
    if (it > 0) {
      Vector s = c - c_prev;
      Vector y = g - g_prev;
      double sy = s.dot(y);
      if (sy > 0.0)
        alpha = std::clamp(s.squaredNorm() / sy, 1e-14, 1e14);
      else
        alpha = std::clamp(alpha * 2.0, 1e-14, 1e14);
    }
    double step = alpha;
    double g2 = g.squaredNorm();
    bool moved = false;
    Vector cand;
    double cand_obj = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      cand = c - step * g;
      cand_obj = lp_power_objective(f0 - phi * cand, p);
      if (cand_obj <= obj - 1e-4 * step * g2) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return c;  // descent exhausted at machine precision
    c_prev = c;
    g_prev = g;
    c = cand;
    obj = cand_obj;
    g = grad_at(c);
  }
  throw SolverError("span projection did not reach stationarity",
                    g.lpNorm<Eigen::Infinity>());
}

// Bracket a 1-D convex function by doubling expansion around x0, then
// golden-section to relative width 1e-13.
inline double minimize_1d(const std::function<double(double)>& f, double x0) {
  double step = 1.0;
  double lo = x0 - step, hi = x0 + step;
  double flo = f(lo), fmid = f(x0), fhi = f(hi);
  double mid = x0;
  for (int guard = 0; guard < 200 && (flo < fmid || fhi < fmid); ++guard) {
    if (flo < fmid) {
      hi = mid;
      fhi = fmid;
      mid = lo;
      fmid = flo;
      lo = mid - step;
      flo = f(lo);
    } else {
      lo = mid;
      flo = fmid;
      mid = hi;
      fmid = fhi;
      hi = mid + step;
      fhi = f(hi);
    }
    step *= 2.0;
  }
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-13 * (1.0 + std::abs(a) + std::abs(b))) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace gdesc::detail
