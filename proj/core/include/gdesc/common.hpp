#pragma once

#include <Eigen/Core>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace gdesc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Inner convex solve did not reach the requested stationarity.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double achieved_grad_norm)
      : std::runtime_error(what), achieved_grad_norm(achieved_grad_norm) {}
  double achieved_grad_norm;
};

// Enumeration or wall-clock budget exceeded before the computation finished.
class BudgetExceeded : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Gradient requested at a point where the energy is not differentiable.
class GradientSingularity : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structural invariant of a data object does not hold (e.g. an atom with
// norm above one). Carries the offending index when there is one.
class InvariantViolation : public std::runtime_error {
 public:
  explicit InvariantViolation(const std::string& what, int index = -1)
      : std::runtime_error(what), index(index) {}
  int index;
};

// Shortest representation that round-trips a double through text.
inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace gdesc
