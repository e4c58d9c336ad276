#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "gdesc/common.hpp"
#include "gdesc/dictionary.hpp"
#include "gdesc/spaces.hpp"

namespace gdesc {

struct GreedyConfig {
  double t = 1.0;           // weakness parameter, in (0, 1]
  double b = 0.5;           // step damping for the dual-based expansion
  int max_iter = 100;
  double inner_tol = 1e-10;  // stationarity tolerance of inner solves
  double stop_norm = 1e-12;  // stop when ||f_m|| <= stop_norm * ||f_0||
  bool first_acceptable = false;

  void validate() const;
};

// selected_index is signed and 1-based: +j selects g_j, -j selects -g_j,
// 0 marks a row where no selection happened.
struct TraceRow {
  int iter = 0;
  int selected_index = 0;
  double residual_norm = 0.0;
  double coeff_l1 = 0.0;
};

struct GuaranteeInfo {
  double beta = 0.0;
  double kappa = 0.0;
  double contraction = 1.0;
};

struct Trace {
  double initial_norm = 0.0;
  std::vector<TraceRow> rows;
  std::optional<GuaranteeInfo> guarantee;
  std::optional<int> phase_switch;
  bool stagnated = false;

  void save_csv(const std::filesystem::path& path) const;
  static Trace load_csv(const std::filesystem::path& path);
};

struct Selection {
  int signed_index = 0;
  double value = 0.0;
};

// Evaluates the norming functional of `residual` over the symmetrized
// dictionary and picks the t-weak winner. Candidates are scanned in the
// order +g_1, -g_1, +g_2, -g_2, ...; with first_acceptable the first
// candidate reaching t * sup wins, otherwise the scan keeps the best
// value seen (ties resolve to the earliest candidate).
Selection select_atom(const Vector& residual, const Dictionary& dict,
                      const SmoothSpace& sp, double t,
                      bool first_acceptable = false);

// kappa = (1/2) (t beta / (4 gamma))^(1/(q-1)) and the per-step norm
// contraction 1 - kappa t beta that a beta lower bound certifies.
GuaranteeInfo guaranteed_contraction(const SmoothSpace& sp, double beta_lower,
                                     double t);

Trace run_wcga(const Vector& f0, const Dictionary& dict, const SmoothSpace& sp,
               const GreedyConfig& cfg);
Trace run_wgafr(const Vector& f0, const Dictionary& dict,
                const SmoothSpace& sp, const GreedyConfig& cfg);
Trace run_wga(const Vector& f0, const Dictionary& dict,
              const GreedyConfig& cfg);
Trace run_woga(const Vector& f0, const Dictionary& dict,
               const GreedyConfig& cfg);

// Orthogonal phase for `switch_iter` steps, pure greedy afterwards.
// switch_iter < 0 selects ceil(sqrt(d)).
Trace run_hybrid(const Vector& f0, const Dictionary& dict,
                 const GreedyConfig& cfg, int switch_iter = -1);

struct DgaStep {
  int signed_index = 0;
  double coefficient = 0.0;
  double correlation = 0.0;  // max_g |F_f(g)| before the step
  double residual_norm = 0.0;
};

struct DgaResult {
  Trace trace;
  std::vector<DgaStep> steps;
  double coefficient_sum = 0.0;
  bool stagnated = false;
};

// Dual-based expansion with the closed-form step
// c_m = ||f_{m-1}|| (t b r / (2 gamma))^(1/(q-1)), r = max_g |F_f(g)|.
DgaResult run_dga(const Vector& f0, const Dictionary& dict,
                  const SmoothSpace& sp, const GreedyConfig& cfg);

}  // namespace gdesc
