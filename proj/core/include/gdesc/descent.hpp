#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gdesc/common.hpp"
#include "gdesc/dictionary.hpp"
#include "gdesc/greedy.hpp"
#include "gdesc/spaces.hpp"

namespace gdesc {

// Convex objective with uniformly smooth structure: the energy modulus is
// bounded by gamma * u^q on the working region, and C0 bounds the data
// scale entering the convergence-rate constant. grad must throw
// GradientSingularity on non-finite or undefined gradients.
struct Energy {
  std::function<double(const Vector&)> eval;
  std::function<Covector(const Vector&)> grad;
  double q = 2.0;
  double gamma = 0.5;
  double C0 = 1.0;
  std::optional<double> known_min;
  int dim = 0;
  // Set when E(x) = (1/2) ||x - target||_2^2; inner minimizations then use
  // the exact least-squares path.
  std::optional<Vector> quadratic_target;
};

Energy make_quadratic_energy(const Vector& y);

// E(x) = V(||x - f0||_X) for increasing convex V with V'(0) = 0.
Energy make_norm_composite_energy(
    const Vector& f0, std::function<double(double)> V,
    std::function<double(double)> Vprime, const SmoothSpace& sp, double q,
    double gamma, double C0);

// Least-squares fitting over an arbitrary column matrix, recast as energy
// minimization over the normalized-column dictionary.
struct LassoRecast {
  Dictionary dict;
  Energy energy;
  Vector column_norms;

  Vector map_back(const Vector& dict_coeffs) const;
};

LassoRecast lasso_recast(const Matrix& phi, const Vector& y);

struct DescentRow {
  int iter = 0;
  int selected_index = 0;
  double energy = 0.0;
  double energy_gap = 0.0;
};

struct DescentTrace {
  double initial_energy = 0.0;
  std::vector<DescentRow> rows;
  std::optional<double> proof_B;
  bool optimum_reached = false;

  void save_csv(const std::filesystem::path& path) const;
  static DescentTrace load_csv(const std::filesystem::path& path);
};

// B = (4 C0 / (t beta))^(q/(q-1)) (2 gamma)^(1/(q-1)); the induction
// a_m <= (B/m)^(q-1) controls the energy gap once B >= a_0.
double proof_bound_B(double t, double beta, double gamma, double q, double C0);

DescentTrace run_wcga_co(const Energy& energy, const Dictionary& dict,
                         const SmoothSpace& sp, const GreedyConfig& cfg,
                         std::optional<double> certified_beta = {});
DescentTrace run_wgafr_co(const Energy& energy, const Dictionary& dict,
                          const SmoothSpace& sp, const GreedyConfig& cfg,
                          std::optional<double> certified_beta = {});

struct EnergyValidation {
  double max_grad_rel_err = 0.0;
  bool gradient_ok = false;
  double max_lower_violation = 0.0;   // convexity side of the sandwich
  double max_upper_excess = 0.0;      // smoothness side, against 2 gamma u^q
  bool sandwich_ok = false;
  int samples = 0;
};

EnergyValidation validate_energy(const Energy& energy, const SmoothSpace& sp,
                                 int n_samples, std::uint64_t seed);

// rho(E, u) = (1/2) sup |E(x+uy) + E(x-uy) - 2E(x)| over x in the
// radius-ball and sp-unit y, estimated by sampling.
ModulusTable estimate_energy_modulus(const Energy& energy,
                                     const SmoothSpace& sp,
                                     std::span<const double> u_grid,
                                     double radius, int n_samples,
                                     std::uint64_t seed);

struct EquivalenceReport {
  bool identical = false;
  int tie_tolerated = 0;
  int steps_compared = 0;
  int first_mismatch = 0;  // 0 when none
  double max_energy_gap_diff = 0.0;
  bool pass = false;
};

// Runs the residual-norm algorithm and its energy recast
// E(x) = (1/2)||x - f0||_2^2 side by side and compares selection
// sequences and energies step by step.
EquivalenceReport check_equivalence_co(const Vector& f0,
                                       const Dictionary& dict,
                                       const SmoothSpace& sp,
                                       const GreedyConfig& cfg,
                                       double tie_tol = 1e-12,
                                       double energy_tol = 1e-8);

}  // namespace gdesc
