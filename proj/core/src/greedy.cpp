#include "gdesc/greedy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "detail.hpp"

namespace gdesc {

namespace {

constexpr int kRecomputeEvery = 32;
constexpr int kStallWindow = 100;

using detail::lp_span_min;
using detail::minimize_1d;

struct StallGuard {
  double floor;
  double last;
  int count = 0;
  explicit StallGuard(double initial, double rel)
      : floor(rel * initial), last(initial) {}
  bool stalled(double now) {
    if (last - now < floor)
      ++count;
    else
      count = 0;
    last = now;
    return count >= kStallWindow;
  }
};

// Shared orthogonal-projection loop behind run_wcga and run_woga.
Trace run_orthogonal(const Vector& f0, const Dictionary& dict,
                     const SmoothSpace& sp, const GreedyConfig& cfg,
                     bool attach_guarantee) {
  cfg.validate();
  if (f0.size() != dict.dim() || sp.dim() != dict.dim())
    throw std::invalid_argument("greedy: dimension mismatch");

  Trace tr;
  tr.initial_norm = sp.norm(f0);
  if (attach_guarantee) {
    if (auto beta = dict.best_beta_lower())
      tr.guarantee = guaranteed_contraction(sp, *beta, cfg.t);
  }
  if (tr.initial_norm == 0.0) return tr;

  const double floor = cfg.stop_norm * tr.initial_norm;
  Vector f = f0;
  std::vector<int> order;
  std::vector<char> in_set(dict.size(), 0);
  Vector warm;

  for (int m = 1; m <= cfg.max_iter; ++m) {
    double fn = sp.norm(f);
    if (fn <= floor) break;
    Selection s = select_atom(f, dict, sp, cfg.t, cfg.first_acceptable);
    int j = std::abs(s.signed_index) - 1;
    bool fresh = !in_set[j];
    if (fresh) {
      in_set[j] = 1;
      order.push_back(j);
    }
    Matrix sub(dict.dim(), order.size());
    for (size_t k = 0; k < order.size(); ++k) sub.col(k) = dict.atom(order[k]);
    Vector w = Vector::Zero(order.size());
    if (warm.size() > 0) w.head(warm.size()) = warm;
    Vector c = lp_span_min(f0, sub, sp.p(), cfg.inner_tol, w);
    warm = c;
    Vector nf = f0 - sub * c;
    double nn = sp.norm(nf);
    tr.rows.push_back({m, s.signed_index, nn, c.template lpNorm<1>()});
    if (!fresh && fn - nn < 1e-14 * tr.initial_norm) {
      tr.stagnated = true;
      break;
    }
    f = nf;
  }
  return tr;
}

void write_trace_meta(std::ostream& out, const Trace& tr) {
  out << "# initial_norm=" << format_g17(tr.initial_norm)
      << " stagnated=" << (tr.stagnated ? 1 : 0);
  if (tr.phase_switch) out << " phase_switch=" << *tr.phase_switch;
  if (tr.guarantee)
    out << " guarantee_beta=" << format_g17(tr.guarantee->beta)
        << " guarantee_kappa=" << format_g17(tr.guarantee->kappa)
        << " guarantee_contraction=" << format_g17(tr.guarantee->contraction);
  out << "\n";
}

}  // namespace

void GreedyConfig::validate() const {
  if (!(t > 0.0) || t > 1.0)
    throw std::invalid_argument("GreedyConfig: t must be in (0, 1]");
  if (!(b > 0.0) || b >= 1.0)
    throw std::invalid_argument("GreedyConfig: b must be in (0, 1)");
  if (max_iter < 0)
    throw std::invalid_argument("GreedyConfig: max_iter must be >= 0");
  if (!(inner_tol > 0.0))
    throw std::invalid_argument("GreedyConfig: inner_tol must be > 0");
  if (stop_norm < 0.0)
    throw std::invalid_argument("GreedyConfig: stop_norm must be >= 0");
}

Selection select_atom(const Vector& residual, const Dictionary& dict,
                      const SmoothSpace& sp, double t, bool first_acceptable) {
  if (!(t > 0.0) || t > 1.0)
    throw std::invalid_argument("select_atom: t must be in (0, 1]");
  Covector F = sp.norming_functional(residual);
  Vector v = dict.atoms().transpose() * F.coords;
  const int n = int(v.size());
  if (first_acceptable) {
    double thr = t * v.cwiseAbs().maxCoeff();
    for (int j = 0; j < n; ++j) {
      if (v[j] >= thr) return {j + 1, v[j]};
      if (-v[j] >= thr) return {-(j + 1), -v[j]};
    }
  }
  int best = 1;
  double bv = v[0];
  if (-v[0] > bv) {
    best = -1;
    bv = -v[0];
  }
  for (int j = 1; j < n; ++j) {
    if (v[j] > bv) {
      best = j + 1;
      bv = v[j];
    }
    if (-v[j] > bv) {
      best = -(j + 1);
      bv = -v[j];
    }
  }
  return {best, bv};
}

GuaranteeInfo guaranteed_contraction(const SmoothSpace& sp, double beta_lower,
                                     double t) {
  if (!(beta_lower > 0.0) || beta_lower > 1.0 + 1e-12)
    throw std::invalid_argument(
        "guaranteed_contraction: beta_lower must be in (0, 1]");
  if (!(t > 0.0) || t > 1.0)
    throw std::invalid_argument("guaranteed_contraction: t must be in (0, 1]");
  double kappa = 0.5 * std::pow(t * beta_lower / (4.0 * sp.gamma()),
                                1.0 / (sp.q() - 1.0));
  double contraction = 1.0 - kappa * t * beta_lower;
  if (!(contraction > 0.0) || !(contraction < 1.0))
    throw InvariantViolation(
        "guaranteed_contraction: factor outside (0, 1): " +
        format_g17(contraction));
  return {beta_lower, kappa, contraction};
}

Trace run_wcga(const Vector& f0, const Dictionary& dict, const SmoothSpace& sp,
               const GreedyConfig& cfg) {
  return run_orthogonal(f0, dict, sp, cfg, true);
}

Trace run_woga(const Vector& f0, const Dictionary& dict,
               const GreedyConfig& cfg) {
  return run_orthogonal(f0, dict, SmoothSpace::lp(dict.dim(), 2.0), cfg,
                        true);
}

Trace run_wgafr(const Vector& f0, const Dictionary& dict,
                const SmoothSpace& sp, const GreedyConfig& cfg) {
  cfg.validate();
  if (f0.size() != dict.dim() || sp.dim() != dict.dim())
    throw std::invalid_argument("greedy: dimension mismatch");

  Trace tr;
  tr.initial_norm = sp.norm(f0);
  if (tr.initial_norm == 0.0) return tr;
  const double floor = cfg.stop_norm * tr.initial_norm;

  Vector approx = Vector::Zero(dict.dim());
  Vector coeff = Vector::Zero(dict.size());
  Vector f = f0;
  StallGuard stall(tr.initial_norm, 1e-15);

  for (int m = 1; m <= cfg.max_iter; ++m) {
    double fn = sp.norm(f);
    if (fn <= floor) break;
    Selection s = select_atom(f, dict, sp, cfg.t, cfg.first_acceptable);
    int j = std::abs(s.signed_index) - 1;
    double sign = s.signed_index > 0 ? 1.0 : -1.0;
    Vector phi = sign * dict.atom(j);

    double a, lam;
    if (sp.p() == 2.0) {
      if (approx.norm() < 1e-300) {
        a = 0.0;
        lam = f0.dot(phi) / phi.squaredNorm();
      } else {
        Matrix basis(dict.dim(), 2);
        basis.col(0) = approx;
        basis.col(1) = phi;
        Vector z = basis.completeOrthogonalDecomposition().solve(f0);
        a = z[0];
        lam = z[1];
      }
    } else {
      a = 1.0;
      lam = 0.0;
      auto value = [&](double aa, double ll) {
        return sp.norm(f0 - aa * approx - ll * phi);
      };
      for (int round = 0; round < 40; ++round) {
        double lam2 = minimize_1d([&](double x) { return value(a, x); }, lam);
        double a2 =
            approx.norm() < 1e-300
                ? a
                : minimize_1d([&](double x) { return value(x, lam2); }, a);
        if (std::abs(lam2 - lam) + std::abs(a2 - a) <
            1e-13 * (1.0 + std::abs(lam) + std::abs(a))) {
          lam = lam2;
          a = a2;
          break;
        }
        lam = lam2;
        a = a2;
      }
      if (value(a, lam) > fn) {  // keep the current approximant instead
        a = 1.0;
        lam = 0.0;
      }
    }

    approx = a * approx + lam * phi;
    coeff *= a;
    coeff[j] += lam * sign;
    f = f0 - approx;
    double nn = sp.norm(f);
    tr.rows.push_back({m, s.signed_index, nn, coeff.template lpNorm<1>()});
    if (stall.stalled(nn)) {
      tr.stagnated = true;
      break;
    }
  }
  return tr;
}

Trace run_wga(const Vector& f0, const Dictionary& dict,
              const GreedyConfig& cfg) {
  cfg.validate();
  if (f0.size() != dict.dim())
    throw std::invalid_argument("greedy: dimension mismatch");
  SmoothSpace sp = SmoothSpace::lp(dict.dim(), 2.0);

  Trace tr;
  tr.initial_norm = f0.norm();
  if (tr.initial_norm == 0.0) return tr;
  const double floor = cfg.stop_norm * tr.initial_norm;

  Vector coeff = Vector::Zero(dict.size());
  Vector f = f0;
  StallGuard stall(tr.initial_norm, 1e-15);

  for (int m = 1; m <= cfg.max_iter; ++m) {
    if (f.norm() <= floor) break;
    Selection s = select_atom(f, dict, sp, cfg.t, cfg.first_acceptable);
    int j = std::abs(s.signed_index) - 1;
    double sign = s.signed_index > 0 ? 1.0 : -1.0;
    Vector phi = sign * dict.atom(j);
    double c = f.dot(phi) / phi.squaredNorm();
    coeff[j] += c * sign;
    f -= c * phi;
    if (m % kRecomputeEvery == 0) f = f0 - dict.atoms() * coeff;
    double nn = f.norm();
    tr.rows.push_back({m, s.signed_index, nn, coeff.template lpNorm<1>()});
    if (stall.stalled(nn)) {
      tr.stagnated = true;
      break;
    }
  }
  return tr;
}

Trace run_hybrid(const Vector& f0, const Dictionary& dict,
                 const GreedyConfig& cfg, int switch_iter) {
  cfg.validate();
  if (f0.size() != dict.dim())
    throw std::invalid_argument("greedy: dimension mismatch");
  if (switch_iter < 0)
    switch_iter = int(std::ceil(std::sqrt(double(dict.dim()))));
  SmoothSpace sp = SmoothSpace::lp(dict.dim(), 2.0);

  Trace tr;
  tr.initial_norm = f0.norm();
  if (tr.initial_norm == 0.0) return tr;
  const double floor = cfg.stop_norm * tr.initial_norm;

  Vector coeff = Vector::Zero(dict.size());
  Vector f = f0;
  std::vector<int> order;
  std::vector<char> in_set(dict.size(), 0);
  StallGuard stall(tr.initial_norm, 1e-15);
  int m = 1;

  for (; m <= std::min(switch_iter, cfg.max_iter); ++m) {
    if (f.norm() <= floor) break;
    Selection s = select_atom(f, dict, sp, cfg.t, cfg.first_acceptable);
    int j = std::abs(s.signed_index) - 1;
    if (!in_set[j]) {
      in_set[j] = 1;
      order.push_back(j);
    }
    Matrix sub(dict.dim(), order.size());
    for (size_t k = 0; k < order.size(); ++k) sub.col(k) = dict.atom(order[k]);
    Vector c = sub.completeOrthogonalDecomposition().solve(f0);
    coeff.setZero();
    for (size_t k = 0; k < order.size(); ++k) coeff[order[k]] = c[k];
    f = f0 - sub * c;
    tr.rows.push_back({m, s.signed_index, f.norm(), c.template lpNorm<1>()});
  }

  if (m <= cfg.max_iter && f.norm() > floor) tr.phase_switch = m;

  for (; m <= cfg.max_iter; ++m) {
    if (f.norm() <= floor) break;
    Selection s = select_atom(f, dict, sp, cfg.t, cfg.first_acceptable);
    int j = std::abs(s.signed_index) - 1;
    double sign = s.signed_index > 0 ? 1.0 : -1.0;
    Vector phi = sign * dict.atom(j);
    double c = f.dot(phi) / phi.squaredNorm();
    coeff[j] += c * sign;
    f -= c * phi;
    if (m % kRecomputeEvery == 0) f = f0 - dict.atoms() * coeff;
    double nn = f.norm();
    tr.rows.push_back({m, s.signed_index, nn, coeff.template lpNorm<1>()});
    if (stall.stalled(nn)) {
      tr.stagnated = true;
      break;
    }
  }
  return tr;
}

DgaResult run_dga(const Vector& f0, const Dictionary& dict,
                  const SmoothSpace& sp, const GreedyConfig& cfg) {
  cfg.validate();
  if (f0.size() != dict.dim() || sp.dim() != dict.dim())
    throw std::invalid_argument("greedy: dimension mismatch");

  DgaResult res;
  res.trace.initial_norm = sp.norm(f0);
  if (res.trace.initial_norm == 0.0) return res;
  const double floor = cfg.stop_norm * res.trace.initial_norm;
  const double q = sp.q();
  const double gamma = sp.gamma();

  Vector coeff = Vector::Zero(dict.size());
  Vector f = f0;
  StallGuard stall(res.trace.initial_norm, 1e-15);

  for (int m = 1; m <= cfg.max_iter; ++m) {
    double fn = sp.norm(f);
    if (fn <= floor) break;
    Covector F = sp.norming_functional(f);
    Vector v = dict.atoms().transpose() * F.coords;
    double r = v.cwiseAbs().maxCoeff();
    if (r <= 0.0) {
      res.stagnated = true;
      break;
    }
    Selection s = select_atom(f, dict, sp, cfg.t, cfg.first_acceptable);
    int j = std::abs(s.signed_index) - 1;
    double sign = s.signed_index > 0 ? 1.0 : -1.0;

    double c = fn * std::pow(cfg.t * cfg.b * r / (2.0 * gamma),
                             1.0 / (q - 1.0));
    coeff[j] += c * sign;
    f -= c * sign * dict.atom(j);
    if (m % kRecomputeEvery == 0) f = f0 - dict.atoms() * coeff;
    double nn = sp.norm(f);
    res.coefficient_sum += c;
    res.steps.push_back({s.signed_index, c, r, nn});
    res.trace.rows.push_back(
        {m, s.signed_index, nn, coeff.template lpNorm<1>()});
    if (stall.stalled(nn)) {
      res.stagnated = true;
      break;
    }
  }
  res.trace.stagnated = res.stagnated;
  return res;
}

// --- trace CSV --------------------------------------------------------

void Trace::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("Trace::save_csv: cannot open " + path.string());
  write_trace_meta(out, *this);
  out << "iter,selected_index,residual_norm,coeff_l1\n";
  for (const auto& r : rows)
    out << r.iter << "," << r.selected_index << ","
        << format_g17(r.residual_norm) << "," << format_g17(r.coeff_l1)
        << "\n";
}

Trace Trace::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("Trace::load_csv: cannot open " + path.string());
  Trace tr;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("Trace::load_csv: empty file");
  if (!line.empty() && line[0] == '#') {
    std::istringstream ss(line.substr(1));
    std::string tok;
    GuaranteeInfo gi;
    bool has_g = false;
    while (ss >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq);
      std::string val = tok.substr(eq + 1);
      if (key == "initial_norm")
        tr.initial_norm = std::strtod(val.c_str(), nullptr);
      else if (key == "stagnated")
        tr.stagnated = val == "1";
      else if (key == "phase_switch")
        tr.phase_switch = std::stoi(val);
      else if (key == "guarantee_beta") {
        gi.beta = std::strtod(val.c_str(), nullptr);
        has_g = true;
      } else if (key == "guarantee_kappa") {
        gi.kappa = std::strtod(val.c_str(), nullptr);
        has_g = true;
      } else if (key == "guarantee_contraction") {
        gi.contraction = std::strtod(val.c_str(), nullptr);
        has_g = true;
      }
    }
    if (has_g) tr.guarantee = gi;
    if (!std::getline(in, line))
      throw std::invalid_argument("Trace::load_csv: missing header");
  }
  if (line != "iter,selected_index,residual_norm,coeff_l1")
    throw std::invalid_argument("Trace::load_csv: unexpected header '" + line +
                                "'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow row;
    const char* p = line.c_str();
    char* end = nullptr;
    row.iter = int(std::strtol(p, &end, 10));
    if (end == p || *end != ',')
      throw std::invalid_argument("Trace::load_csv: bad row '" + line + "'");
    p = end + 1;
    row.selected_index = int(std::strtol(p, &end, 10));
    if (end == p || *end != ',')
      throw std::invalid_argument("Trace::load_csv: bad row '" + line + "'");
    p = end + 1;
    row.residual_norm = std::strtod(p, &end);
    if (end == p || *end != ',')
      throw std::invalid_argument("Trace::load_csv: bad row '" + line + "'");
    p = end + 1;
    row.coeff_l1 = std::strtod(p, &end);
    if (end == p)
      throw std::invalid_argument("Trace::load_csv: bad row '" + line + "'");
    tr.rows.push_back(row);
  }
  return tr;
}

}  // namespace gdesc
