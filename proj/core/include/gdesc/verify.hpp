#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gdesc/common.hpp"
#include "gdesc/descent.hpp"
#include "gdesc/dictionary.hpp"
#include "gdesc/greedy.hpp"
#include "gdesc/spaces.hpp"

namespace gdesc {

using json = nlohmann::ordered_json;

struct RateFit {
  int m_lo = 0;       // effective window after truncation
  int m_hi = 0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

// Least-squares fit of log(value) against log(m) over m in [m_lo, m_hi];
// values[k] is the value at m = k+1. Values at or below `floor` truncate
// the window at the previous m. Throws std::invalid_argument when fewer
// than 8 points survive.
RateFit fit_rate(const std::vector<double>& values, int m_lo, int m_hi,
                 double floor = 0.0);

// Slope assertion over [m_lo, m_hi] with the collapse rule: a sequence
// whose values hit the floor before the window can produce eight points
// has decayed faster than any power law and counts as satisfied. Returns
// {slope, r_squared, points, collapsed_at} and sets *ok.
json rate_check_with_collapse(const std::vector<double>& values, double floor,
                              int m_lo, int m_hi, double max_slope, bool* ok);

struct ExponentialReport {
  bool pass = false;
  int first_violation = 0;  // 0 when none
  double worst_ratio = 0.0;
};

// Asserts values[m] <= factor^m * values[0] * (1 + 1e-9); values[0] is the
// starting value.
ExponentialReport check_exponential(const std::vector<double>& values,
                                    double factor);
ExponentialReport check_exponential(const Trace& trace, double factor);

enum class DecayKind { exponential, power_law, undetermined };

struct DecayClassification {
  DecayKind kind = DecayKind::undetermined;
  double exponential_r2 = 0.0;
  double power_r2 = 0.0;
};

// Compares a log-linear against a log-log fit; values[k] is at m = k+1.
DecayClassification classify_decay(const std::vector<double>& values,
                                   double floor = 0.0);

// Best m-term approximation error in the dictionary's ambient norm, by
// exhaustive enumeration of supports. Budget C(N, m) <= 1e6, enforced via
// BudgetExceeded.
double sigma_m_bruteforce(const Vector& f0, const Dictionary& dict, int m);

// Random signed convex combination of `sparsity` distinct atoms with total
// l1 coefficient mass `budget`; the result lies in budget * A1(D).
Vector random_atomic_target(const Dictionary& dict, double budget,
                            int sparsity, std::uint64_t seed);

// Exactly m-sparse combination with coefficients of magnitude U[0.5, 1.5]
// and random signs. Optionally reports the support and full-length
// coefficient vector.
Vector random_sparse_target(const Dictionary& dict, int sparsity,
                            std::uint64_t seed,
                            std::vector<int>* support = nullptr,
                            Vector* coeffs = nullptr);

struct LebesgueReport {
  double mu = 0.0;
  int m = 0;
  int iterations = 0;
  double sigma_m = 0.0;
  double residual = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

// Runs the orthogonal algorithm for ceil(C1*m) steps and compares the
// residual against C2 * sigma_m(f0). The admissible sparsity range is
// m <= c3 / coherence; all three constants are harness parameters.
LebesgueReport check_lebesgue(const Dictionary& dict, const Vector& f0, int m,
                              double C1 = 2.0, double C2 = 3.0,
                              double c3 = 0.5);

struct IncoherenceProfile {
  int K = 1;         // largest |A| enumerated
  int Dmax = 2;      // cap on |A| + |Lambda|
  double V = 0.0;    // target bound; <= 0 means measure only
  double r = 0.5;

  void validate() const;
};

struct PropertyAReport {
  double min_V = 0.0;
  long pairs = 0;
  double r = 0.0;
  bool pass = false;
};

// Smallest V such that sum_{i in A} |x_i| <= V |A|^r dist(f_A, span Lambda)
// over every enumerated disjoint pair (A within the support, Lambda among
// all atoms). Budget 1e5 pairs, enforced via BudgetExceeded.
PropertyAReport check_property_A(const Dictionary& dict,
                                 const IncoherenceProfile& profile,
                                 const std::vector<int>& support,
                                 const Vector& coeffs);

enum class SuiteName {
  T1_1,
  T1_2,
  T2_4,
  T3_1,
  T3_3,
  eq_2_6,
  eq_2_8,
  lemma_2_1,
  lemma_2_2,
  sec_3_1_equiv
};

std::string to_string(SuiteName name);
std::optional<SuiteName> suite_from_string(const std::string& s);
std::vector<SuiteName> all_suites();

struct SuiteOptions {
  std::uint64_t seed = 7777;
  int seeds = -1;              // -1: suite default
  double budget_seconds = 0.0; // informational sizing hint
  std::filesystem::path out_dir;  // empty: no artifacts written
  int workers = 0;             // <= 0: GREEDY_DESCENT_WORKERS or 1
};

struct SuiteReport {
  std::string suite;
  json spec;
  std::uint64_t seed = 0;
  json metrics;
  bool pass = false;
  std::vector<std::string> artifacts;
  double elapsed_seconds = 0.0;  // not serialized; reports are
                                 // reproducible bit-for-bit

  json to_json() const;
  void save(const std::filesystem::path& path) const;
};

SuiteReport run_theorem_suite(SuiteName name, const SuiteOptions& options);

int resolve_workers(int requested);

}  // namespace gdesc
