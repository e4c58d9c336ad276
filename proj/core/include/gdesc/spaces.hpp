#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gdesc/common.hpp"

namespace gdesc {

// A continuous linear functional on R^d, stored by its coordinates.
// Pairing is the plain dot product; the dual norm is the conjugate-exponent
// norm of the coordinates.
struct Covector {
  Vector coords;

  double operator()(const Vector& x) const {
    if (x.size() != coords.size())
      throw std::invalid_argument("Covector: dimension mismatch in pairing");
    return coords.dot(x);
  }
};

// Finite-dimensional l_p space with declared smoothness parameters (q, gamma)
// such that the modulus of smoothness satisfies rho(u) <= gamma * u^q.
//
// Defaults: 1 < p <= 2 uses (q, gamma) = (p, 1/p); p >= 2 uses (2, (p-1)/2).
// Both give (2, 1/2) at p = 2. The endpoints p = 1 and p = inf are not
// uniformly smooth and are rejected.
class SmoothSpace {
 public:
  static SmoothSpace lp(int d, double p);
  static SmoothSpace lp(int d, double p, double q, double gamma);

  int dim() const { return d_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double gamma() const { return gamma_; }
  bool is_hilbert() const { return p_ == 2.0; }

  double norm(const Vector& x) const;
  double dual_norm(const Covector& f) const;

  // Unique norming functional of a nonzero x: F_x(x) = ||x||, dual norm 1.
  Covector norming_functional(const Vector& x) const;

  // Central difference (||x+uy|| - ||x-uy||) / (2u); approximates F_x(y).
  double directional_derivative(const Vector& x, const Vector& y,
                                double u) const;

 private:
  SmoothSpace(int d, double p, double q, double gamma);
  int d_;
  double p_, q_, gamma_;
};

struct ModulusPoint {
  double u;
  double rho_hat;
};

struct ModulusTable {
  std::vector<ModulusPoint> points;
  // True when every rho_hat <= gamma * u^q + 1e-12 for the space's declared
  // parameters; a false value means the declared (q, gamma) are invalid.
  bool dominated = true;
};

// Empirical modulus of smoothness: for each u, the maximum over n_samples
// random unit pairs (x, y) of (||x+uy|| + ||x-uy||) / 2 - 1.
ModulusTable estimate_modulus(const SmoothSpace& sp,
                              std::span<const double> u_grid, int n_samples,
                              std::uint64_t seed);

// Least-squares fit of log(rho) against log(u); returns the slope, an
// empirical estimate of the power q. Points with rho <= 0 are skipped.
double fit_modulus_exponent(const ModulusTable& table);

}  // namespace gdesc
