#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gdesc/common.hpp"
#include "gdesc/spaces.hpp"

namespace gdesc {

// Two-sided estimate of beta(D, X) = min over unit functionals F of
// max over atoms g of |F(g)|. `upper` is always a certified upper bound
// (the value of some concrete unit functional); `lower`, when present,
// subtracts the Lipschitz slack of the search grid. For grid methods
// grid_tol records that slack.
struct BetaEstimate {
  enum class Method { bruteforce_grid, multistart_descent, canonical_exact };
  double upper = 1.0;
  std::optional<double> lower;
  Method method = Method::multistart_descent;
  std::optional<double> grid_tol;

  double best_lower() const { return lower.value_or(0.0); }
};

std::string to_string(BetaEstimate::Method m);

// A d x N matrix of atoms, one per column, each with ambient norm <= 1.
// Symmetrization (using both g and -g) is applied by the algorithms at
// selection time, never stored. Immutable after setup; the optional beta
// bracket and claimed lower bound are metadata attached by builders or
// callers before the dictionary is shared.
class Dictionary {
 public:
  Dictionary(Matrix atoms, SmoothSpace ambient, std::string label);

  int dim() const { return static_cast<int>(atoms_.rows()); }
  int size() const { return static_cast<int>(atoms_.cols()); }
  const Matrix& atoms() const { return atoms_; }
  Vector atom(int j) const { return atoms_.col(j); }
  const SmoothSpace& ambient() const { return ambient_; }
  const std::string& label() const { return label_; }

  const std::optional<BetaEstimate>& beta() const { return beta_; }
  void set_beta(BetaEstimate b) { beta_ = std::move(b); }
  std::optional<double> claimed_beta_lower() const { return claimed_beta_; }
  void set_claimed_beta_lower(double b) { claimed_beta_ = b; }

  // Best certified lower bound on beta available from metadata.
  std::optional<double> best_beta_lower() const;

  Dictionary symmetrized() const;

  void save_csv(const std::filesystem::path& path) const;
  static Dictionary load_csv(const std::filesystem::path& path);

 private:
  Matrix atoms_;
  SmoothSpace ambient_;
  std::string label_;
  std::optional<BetaEstimate> beta_;
  std::optional<double> claimed_beta_;
};

// --- builders ---------------------------------------------------------

// The d coordinate atoms of l_p^d; attaches the exact beta = d^(-1/2)
// when p = 2.
Dictionary build_canonical(const SmoothSpace& sp);

// N atoms drawn independently, uniform on the Euclidean unit sphere.
Dictionary build_random_sphere(const SmoothSpace& sp, int n,
                               std::uint64_t seed);

struct PackingResult {
  Dictionary dict;
  int requested;
  int achieved;
  long attempts;
};

// Greedy rejection packing: unit atoms are drawn at random and kept when
// their coherence with every kept atom stays <= mu. Stops at n_target or
// when max_attempts draws are spent; falling short is reported, not an
// error.
PackingResult build_incoherent(int d, int n_target, double mu,
                               long max_attempts, std::uint64_t seed);

// --- analytics --------------------------------------------------------

struct CoherenceInfo {
  double value = 0.0;
  bool renormalized = false;
};

// Largest |<g_i, g_j>| over distinct pairs, l2 inner products of the
// l2-normalized atoms. Records whether any renormalization was needed.
CoherenceInfo coherence_info(const Dictionary& dict);
double coherence(const Dictionary& dict);

// Exhaustive grid search for beta over the unit sphere of functionals.
// p = 2 and d in {2, 3} only: d = 2 walks an angular grid, d = 3 a
// spherical Fibonacci lattice. The slack between upper and lower is the
// grid's maximal gap; the objective is 1-Lipschitz on the sphere.
BetaEstimate beta_bruteforce(const Dictionary& dict,
                             long grid_resolution = 1'000'000);

// Upper bound on the maximal chordal gap of the n-point spherical
// Fibonacci lattice (empirical constant, validated by tests).
double fibonacci_max_gap(long n);

// Multistart minimization of max |<F, g>| over unit functionals F:
// subgradient steps, then a smoothed max descent with annealed exponent,
// then an active-set equalization polish. Returns the best exact value
// found (a certified upper bound); no lower bound.
BetaEstimate beta_upper(const Dictionary& dict, int restarts,
                        std::uint64_t seed);

// Bound on beta for any dictionary in R^d with at most d^a atoms:
// (2 (a ln d + ln 2) / d)^(1/2). Vacuous when >= 1.
double beta_cardinality_bound(int d, double a);

// --- atomic norm ------------------------------------------------------

struct AtomicNormConfig {
  double t = 1.0;
  double b = 0.05;
  double eta = 1e-7;     // target residual for the expansion
  int max_steps = 200000;
  int random_covectors = 64;
  int optimized_covectors = 4;
  std::uint64_t seed = 12345;
  std::optional<double> beta_lower;  // overrides dictionary metadata
};

struct AtomicNormBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool in_span = true;
  int expansion_steps = 0;
  double expansion_residual = 0.0;
};

// Two-sided bounds on ||x||_A (least l1 cost of writing x over the
// symmetrized atoms). Upper: coefficient sum of a small-step greedy
// expansion plus a residual term; lower: duality, max over sampled and
// optimized covectors F of |F(x)| / max_g |F(g)|. x must lie in the span
// of the atoms; otherwise in_span = false and upper = inf.
AtomicNormBounds atomic_norm_bounds(const Vector& x, const Dictionary& dict,
                                    const AtomicNormConfig& cfg = {});

// Exact atomic norm by support enumeration + least squares; p = 2 and
// N <= 12 only. Returns infinity when x is outside the span.
double atomic_norm_exact_small(const Vector& x, const Dictionary& dict);

struct R1BetaReport {
  double r1_lower = 0.0;
  double r1_upper = 0.0;
  double beta_lower = 0.0;
  double beta_upper = 0.0;
  double product_lower = 0.0;  // r1_lower * beta_lower
  double product_upper = 0.0;  // r1_upper * beta_upper
  bool intersects = false;     // [r1_lo, r1_hi] meets [1/beta_hi, 1/beta_lo]
  bool contains_one = false;   // product bracket contains 1
  double width = 0.0;          // product bracket width
  int samples = 0;
};

// Checks the identity sup_{||x|| <= 1} ||x||_A = 1 / beta numerically.
// p = 2, d <= 3. The unit-vector sample set always includes the
// beta-minimizing functional direction found by the grid, which makes the
// product bracket provably contain 1.
R1BetaReport check_R1_beta(const Dictionary& dict, int n_samples,
                           std::uint64_t seed);

// --- coverings --------------------------------------------------------

struct CoveringSpec {
  enum class Target { unit_sphere, unit_ball };
  std::vector<Vector> centers;
  double radius = 0.0;
  Target target = Target::unit_sphere;

  int dim() const { return centers.empty() ? 0 : int(centers[0].size()); }
  void validate() const;  // radius in (0,1), center norms <= 1
  void save_csv(const std::filesystem::path& path) const;
  static CoveringSpec load_csv(const std::filesystem::path& path);
};

// From a dictionary with a certified beta lower bound: centers +-beta g_j,
// radius sqrt(1 - beta^2), covering the unit ball. beta is capped at
// 2^(-1/2) so the construction is total.
CoveringSpec covering_from_beta(const Dictionary& dict);

// Normalized centers of a sphere covering of radius r form a dictionary
// with beta >= sqrt(1 - r^2); the claim is attached as metadata to be
// checked against beta_bruteforce.
Dictionary dictionary_from_covering(const CoveringSpec& cov);

struct CoveringReport {
  double fraction_covered = 0.0;
  double worst_min_dist = 0.0;
  long samples = 0;
  bool pass = false;
};

// Monte-Carlo check: samples the target set uniformly and measures the
// distance to the nearest center.
CoveringReport verify_covering(const CoveringSpec& cov, long n_samples,
                               std::uint64_t seed);

}  // namespace gdesc
