#include "gdesc/spaces.hpp"

#include <cmath>

#include "gdesc/random.hpp"

namespace gdesc {

SmoothSpace::SmoothSpace(int d, double p, double q, double gamma)
    : d_(d), p_(p), q_(q), gamma_(gamma) {
  if (d < 1) throw std::invalid_argument("SmoothSpace: dimension must be >= 1");
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument(
        "SmoothSpace: p must be finite and > 1 (p = 1 and p = inf are not "
        "uniformly smooth)");
  if (!(q > 1.0) || q > 2.0)
    throw std::invalid_argument("SmoothSpace: q must lie in (1, 2]");
  if (!(gamma > 0.0))
    throw std::invalid_argument("SmoothSpace: gamma must be positive");
  if (p == 2.0 && (q != 2.0 || gamma != 0.5))
    throw std::invalid_argument(
        "SmoothSpace: p = 2 requires (q, gamma) = (2, 1/2)");
}

SmoothSpace SmoothSpace::lp(int d, double p) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument(
        "SmoothSpace: p must be finite and > 1 (p = 1 and p = inf are not "
        "uniformly smooth)");
  if (p <= 2.0) return SmoothSpace(d, p, p, 1.0 / p);
  return SmoothSpace(d, p, 2.0, (p - 1.0) / 2.0);
}

SmoothSpace SmoothSpace::lp(int d, double p, double q, double gamma) {
  return SmoothSpace(d, p, q, gamma);
}

double SmoothSpace::norm(const Vector& x) const {
  if (x.size() != d_)
    throw std::invalid_argument("SmoothSpace::norm: dimension mismatch");
  if (p_ == 2.0) return x.norm();
  // Scale out the largest magnitude to avoid overflow for large p.
  double amax = x.cwiseAbs().maxCoeff();
  if (amax == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < d_; ++i) s += std::pow(std::abs(x[i]) / amax, p_);
  return amax * std::pow(s, 1.0 / p_);
}

double SmoothSpace::dual_norm(const Covector& f) const {
  if (f.coords.size() != d_)
    throw std::invalid_argument("SmoothSpace::dual_norm: dimension mismatch");
  if (p_ == 2.0) return f.coords.norm();
  double pd = p_ / (p_ - 1.0);
  double amax = f.coords.cwiseAbs().maxCoeff();
  if (amax == 0.0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < d_; ++i) s += std::pow(std::abs(f.coords[i]) / amax, pd);
  return amax * std::pow(s, 1.0 / pd);
}

Covector SmoothSpace::norming_functional(const Vector& x) const {
  if (x.size() != d_)
    throw std::invalid_argument(
        "SmoothSpace::norming_functional: dimension mismatch");
  double n = norm(x);
  if (n == 0.0)
    throw std::invalid_argument(
        "SmoothSpace::norming_functional: undefined at the zero vector");
  Covector f;
  if (p_ == 2.0) {
    f.coords = x / n;
    return f;
  }
  f.coords.resize(d_);
  double scale = std::pow(n, 1.0 - p_);
  for (int i = 0; i < d_; ++i) {
    double a = std::abs(x[i]);
    f.coords[i] = a == 0.0 ? 0.0
                           : std::copysign(std::pow(a, p_ - 1.0) * scale, x[i]);
  }
  return f;
}

double SmoothSpace::directional_derivative(const Vector& x, const Vector& y,
                                           double u) const {
  if (x.size() != d_ || y.size() != d_)
    throw std::invalid_argument(
        "SmoothSpace::directional_derivative: dimension mismatch");
  if (!(u > 0.0))
    throw std::invalid_argument(
        "SmoothSpace::directional_derivative: u must be positive");
  if (norm(x) == 0.0)
    throw std::invalid_argument(
        "SmoothSpace::directional_derivative: undefined at the zero vector");
  return (norm(x + u * y) - norm(x - u * y)) / (2.0 * u);
}

ModulusTable estimate_modulus(const SmoothSpace& sp,
                              std::span<const double> u_grid, int n_samples,
                              std::uint64_t seed) {
  for (double u : u_grid)
    if (u < 0.0)
      throw std::invalid_argument("estimate_modulus: u must be >= 0");
  if (n_samples < 1)
    throw std::invalid_argument("estimate_modulus: n_samples must be >= 1");

  auto rng = make_rng(seed);
  int d = sp.dim();
  std::vector<std::pair<Vector, Vector>> pairs;
  pairs.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    Vector x = random_gaussian(d, rng);
    Vector y = random_gaussian(d, rng);
    double nx = sp.norm(x), ny = sp.norm(y);
    if (nx < 1e-12 || ny < 1e-12) {
      --i;
      continue;
    }
    pairs.emplace_back(x / nx, y / ny);
  }

  ModulusTable table;
  for (double u : u_grid) {
    double best = 0.0;
    if (u > 0.0) {
      for (const auto& [x, y] : pairs) {
        double v = 0.5 * (sp.norm(x + u * y) + sp.norm(x - u * y)) - 1.0;
        if (v > best) best = v;
      }
    }
    table.points.push_back({u, best});
    if (best > sp.gamma() * std::pow(u, sp.q()) + 1e-12)
      table.dominated = false;
  }
  return table;
}

double fit_modulus_exponent(const ModulusTable& table) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& pt : table.points) {
    if (pt.u <= 0.0 || pt.rho_hat <= 0.0) continue;
    double lx = std::log(pt.u), ly = std::log(pt.rho_hat);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2)
    throw std::invalid_argument(
        "fit_modulus_exponent: need at least two positive points");
  double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace gdesc
