#include "gdesc/descent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "detail.hpp"
#include "gdesc/random.hpp"

namespace gdesc {

namespace {

using detail::minimize_1d;

void check_energy_dims(const Energy& energy, const Dictionary& dict,
                       const SmoothSpace& sp) {
  if (energy.dim != dict.dim() || sp.dim() != dict.dim())
    throw std::invalid_argument("descent: dimension mismatch");
}

Covector checked_grad(const Energy& energy, const Vector& x) {
  Covector g = energy.grad(x);
  if (!g.coords.allFinite())
    throw GradientSingularity("energy gradient is not finite");
  return g;
}

// t-weak scan over +g_1, -g_1, +g_2, -g_2, ... of the linear values v.
Selection scan_selection(const Vector& v, double t, bool first_acceptable) {
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

// argmin of E over the span of the given columns; least squares when the
// energy is quadratic, BB descent with Armijo otherwise.
Vector span_energy_min(const Energy& energy, const Matrix& sub,
                       double inner_tol, Vector c) {
  if (energy.quadratic_target)
    return sub.completeOrthogonalDecomposition().solve(
        *energy.quadratic_target);
  if (c.size() != sub.cols()) c = Vector::Zero(sub.cols());

  auto value = [&](const Vector& cc) { return energy.eval(sub * cc); };
  auto grad = [&](const Vector& cc) -> Vector {
    return sub.transpose() * checked_grad(energy, sub * cc).coords;
  };

  double obj = value(c);
  Vector g = grad(c);
  double tol = inner_tol * std::max(1.0, g.lpNorm<Eigen::Infinity>());
  double alpha = 1e-2 / std::max(1.0, g.norm());
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
      cand_obj = value(cand);
      if (cand_obj <= obj - 1e-4 * step * g2) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) return c;
    c_prev = c;
    g_prev = g;
    c = cand;
    obj = cand_obj;
    g = grad(c);
  }
  throw SolverError("span energy minimization did not reach stationarity",
                    g.lpNorm<Eigen::Infinity>());
}

double gap_of(const Energy& energy, double e) {
  return energy.known_min ? e - *energy.known_min
                          : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

Energy make_quadratic_energy(const Vector& y) {
  Energy e;
  e.dim = int(y.size());
  e.q = 2.0;
  e.gamma = 0.5;
  e.C0 = 3.0 * y.norm();
  e.known_min = 0.0;
  e.quadratic_target = y;
  e.eval = [y](const Vector& x) { return 0.5 * (x - y).squaredNorm(); };
  e.grad = [y](const Vector& x) -> Covector {
    Covector g;
    g.coords = x - y;
    if (!g.coords.allFinite())
      throw GradientSingularity("quadratic energy gradient is not finite");
    return g;
  };
  return e;
}

Energy make_norm_composite_energy(const Vector& f0,
                                  std::function<double(double)> V,
                                  std::function<double(double)> Vprime,
                                  const SmoothSpace& sp, double q,
                                  double gamma, double C0) {
  if (f0.size() != sp.dim())
    throw std::invalid_argument(
        "make_norm_composite_energy: dimension mismatch");
  Energy e;
  e.dim = sp.dim();
  e.q = q;
  e.gamma = gamma;
  e.C0 = C0;
  e.known_min = V(0.0);
  e.eval = [f0, V, sp](const Vector& x) {
    double v = V(sp.norm(x - f0));
    if (!std::isfinite(v))
      throw GradientSingularity("composite energy value is not finite");
    return v;
  };
  e.grad = [f0, Vprime, sp](const Vector& x) -> Covector {
    Vector r = x - f0;
    double n = sp.norm(r);
    Covector g;
    if (n == 0.0) {
      if (Vprime(0.0) != 0.0)
        throw GradientSingularity(
            "composite energy gradient undefined at the center");
      g.coords = Vector::Zero(x.size());
      return g;
    }
    double vp = Vprime(n);
    g.coords = vp * sp.norming_functional(r).coords;
    if (!g.coords.allFinite())
      throw GradientSingularity("composite energy gradient is not finite");
    return g;
  };
  return e;
}

Vector LassoRecast::map_back(const Vector& dict_coeffs) const {
  if (dict_coeffs.size() != column_norms.size())
    throw std::invalid_argument("LassoRecast::map_back: size mismatch");
  return dict_coeffs.cwiseQuotient(column_norms);
}

LassoRecast lasso_recast(const Matrix& phi, const Vector& y) {
  if (phi.rows() != y.size())
    throw std::invalid_argument("lasso_recast: dimension mismatch");
  if (phi.cols() < 1)
    throw std::invalid_argument("lasso_recast: needs at least one column");
  Vector norms(phi.cols());
  Matrix atoms = phi;
  for (int j = 0; j < phi.cols(); ++j) {
    norms[j] = phi.col(j).norm();
    if (norms[j] < 1e-14)
      throw std::invalid_argument("lasso_recast: column " + std::to_string(j) +
                                  " is numerically zero");
    atoms.col(j) /= norms[j];
  }
  SmoothSpace sp = SmoothSpace::lp(int(phi.rows()), 2.0);
  Energy e = make_quadratic_energy(y);
  Vector best = phi.completeOrthogonalDecomposition().solve(y);
  e.known_min = 0.5 * (phi * best - y).squaredNorm();
  return {Dictionary(std::move(atoms), sp, "lasso_recast"), std::move(e),
          std::move(norms)};
}

double proof_bound_B(double t, double beta, double gamma, double q,
                     double C0) {
  if (!(t > 0.0) || t > 1.0 || !(beta > 0.0) || beta > 1.0 + 1e-12)
    throw std::invalid_argument("proof_bound_B: t, beta must be in (0, 1]");
  if (!(gamma > 0.0) || !(q > 1.0) || q > 2.0 || !(C0 > 0.0))
    throw std::invalid_argument("proof_bound_B: bad smoothness parameters");
  return std::pow(4.0 * C0 / (t * beta), q / (q - 1.0)) *
         std::pow(2.0 * gamma, 1.0 / (q - 1.0));
}

namespace {

enum class CoKind { chebyshev, free_relaxation };

DescentTrace run_co(const Energy& energy, const Dictionary& dict,
                    const SmoothSpace& sp, const GreedyConfig& cfg,
                    std::optional<double> certified_beta, CoKind kind) {
  cfg.validate();
  check_energy_dims(energy, dict, sp);

  DescentTrace tr;
  Vector approx = Vector::Zero(dict.dim());
  double e = energy.eval(approx);
  tr.initial_energy = e;
  if (certified_beta)
    tr.proof_B = proof_bound_B(cfg.t, *certified_beta, energy.gamma, energy.q,
                               energy.C0);

  double floor_norm = -1.0;
  if (energy.quadratic_target)
    floor_norm = cfg.stop_norm * std::sqrt(2.0 * tr.initial_energy);

  std::vector<int> order;
  std::vector<char> in_set(dict.size(), 0);
  Vector warm;
  Vector coeff = Vector::Zero(dict.size());
  double sup0 = -1.0;
  int stall = 0;

  for (int m = 1; m <= cfg.max_iter; ++m) {
    if (floor_norm >= 0.0 &&
        std::sqrt(2.0 * std::max(0.0, e)) <= floor_norm) {
      tr.optimum_reached = true;
      break;
    }
    Covector g = checked_grad(energy, approx);
    Vector v = -(dict.atoms().transpose() * g.coords);
    double sup = v.cwiseAbs().maxCoeff();
    if (sup0 < 0.0) sup0 = std::max(sup, 1e-300);
    if (sup <= 1e-14 * std::max(1.0, sup0)) {
      tr.optimum_reached = true;
      break;
    }
    Selection s = scan_selection(v, cfg.t, cfg.first_acceptable);
    int j = std::abs(s.signed_index) - 1;
    double prev_e = e;

    if (kind == CoKind::chebyshev) {
      bool fresh = !in_set[j];
      if (fresh) {
        in_set[j] = 1;
        order.push_back(j);
      }
      Matrix sub(dict.dim(), order.size());
      for (size_t k = 0; k < order.size(); ++k)
        sub.col(k) = dict.atom(order[k]);
      Vector w = Vector::Zero(order.size());
      if (warm.size() > 0) w.head(warm.size()) = warm;
      Vector c = span_energy_min(energy, sub, cfg.inner_tol, w);
      warm = c;
      approx = sub * c;
      e = energy.eval(approx);
      tr.rows.push_back({m, s.signed_index, e, gap_of(energy, e)});
      if (!fresh && prev_e - e < 1e-16 * std::max(1.0, std::abs(prev_e)))
        break;
    } else {
      double sign = s.signed_index > 0 ? 1.0 : -1.0;
      Vector phi = sign * dict.atom(j);
      double a, lam;
      if (energy.quadratic_target) {
        const Vector& y = *energy.quadratic_target;
        if (approx.norm() < 1e-300) {
          a = 0.0;
          lam = y.dot(phi) / phi.squaredNorm();
        } else {
          Matrix basis(dict.dim(), 2);
          basis.col(0) = approx;
          basis.col(1) = phi;
          Vector z = basis.completeOrthogonalDecomposition().solve(y);
          a = z[0];
          lam = z[1];
        }
      } else {
        a = 1.0;
        lam = 0.0;
        auto value = [&](double aa, double ll) {
          return energy.eval(aa * approx + ll * phi);
        };
        for (int round = 0; round < 40; ++round) {
          double lam2 =
              minimize_1d([&](double x) { return value(a, x); }, lam);
          double a2 = approx.norm() < 1e-300
                          ? a
                          : minimize_1d(
                                [&](double x) { return value(x, lam2); }, a);
          if (std::abs(lam2 - lam) + std::abs(a2 - a) <
              1e-13 * (1.0 + std::abs(lam) + std::abs(a))) {
            lam = lam2;
            a = a2;
            break;
          }
          lam = lam2;
          a = a2;
        }
        if (value(a, lam) > prev_e) {
          a = 1.0;
          lam = 0.0;
        }
      }
      approx = a * approx + lam * phi;
      coeff *= a;
      coeff[j] += lam * sign;
      e = energy.eval(approx);
      tr.rows.push_back({m, s.signed_index, e, gap_of(energy, e)});
      if (prev_e - e < 1e-18 * std::max(1.0, std::abs(prev_e)))
        ++stall;
      else
        stall = 0;
      if (stall >= 100) break;
    }
  }
  return tr;
}

}  // namespace

DescentTrace run_wcga_co(const Energy& energy, const Dictionary& dict,
                         const SmoothSpace& sp, const GreedyConfig& cfg,
                         std::optional<double> certified_beta) {
  return run_co(energy, dict, sp, cfg, certified_beta, CoKind::chebyshev);
}

DescentTrace run_wgafr_co(const Energy& energy, const Dictionary& dict,
                          const SmoothSpace& sp, const GreedyConfig& cfg,
                          std::optional<double> certified_beta) {
  return run_co(energy, dict, sp, cfg, certified_beta,
                CoKind::free_relaxation);
}

EnergyValidation validate_energy(const Energy& energy, const SmoothSpace& sp,
                                 int n_samples, std::uint64_t seed) {
  if (energy.dim != sp.dim())
    throw std::invalid_argument("validate_energy: dimension mismatch");
  if (n_samples < 1)
    throw std::invalid_argument("validate_energy: n_samples must be >= 1");
  auto rng = make_rng(seed);
  EnergyValidation out;
  out.samples = n_samples;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int i = 0; i < n_samples; ++i) {
    Vector x = random_gaussian(sp.dim(), rng);
    x *= unif(rng) / std::max(sp.norm(x), 1e-300);
    Covector g = checked_grad(energy, x);
    double ex = energy.eval(x);

    for (int k = 0; k < sp.dim(); ++k) {
      double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      Vector xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      double fd = (energy.eval(xp) - energy.eval(xm)) / (2.0 * h);
      double err = std::abs(fd - g.coords[k]) /
                   std::max(1.0, std::abs(g.coords[k]));
      out.max_grad_rel_err = std::max(out.max_grad_rel_err, err);
    }

    Vector yg = random_gaussian(sp.dim(), rng);
    double yn = sp.norm(yg);
    if (yn < 1e-12) continue;
    Vector y = yg / yn;
    for (double u : {1e-3, 1e-2, 1e-1}) {
      double lhs = energy.eval(x + u * y) - ex - u * g(y);
      out.max_lower_violation =
          std::max(out.max_lower_violation, std::max(0.0, -lhs));
      double bound = 2.0 * energy.gamma * std::pow(u, energy.q);
      out.max_upper_excess =
          std::max(out.max_upper_excess, std::max(0.0, lhs - bound));
    }
  }
  out.gradient_ok = out.max_grad_rel_err <= 1e-5;
  out.sandwich_ok =
      out.max_lower_violation <= 1e-9 && out.max_upper_excess <= 1e-9;
  return out;
}

ModulusTable estimate_energy_modulus(const Energy& energy,
                                     const SmoothSpace& sp,
                                     std::span<const double> u_grid,
                                     double radius, int n_samples,
                                     std::uint64_t seed) {
  if (energy.dim != sp.dim())
    throw std::invalid_argument("estimate_energy_modulus: dimension mismatch");
  if (!(radius > 0.0))
    throw std::invalid_argument("estimate_energy_modulus: radius must be > 0");
  if (n_samples < 1)
    throw std::invalid_argument(
        "estimate_energy_modulus: n_samples must be >= 1");
  for (double u : u_grid)
    if (u < 0.0)
      throw std::invalid_argument("estimate_energy_modulus: negative u");

  ModulusTable table;
  table.dominated = true;
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<Vector> xs, ys;
  xs.reserve(n_samples);
  ys.reserve(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    Vector x = random_gaussian(sp.dim(), rng);
    double xn = sp.norm(x);
    x *= xn < 1e-300 ? 0.0 : radius * unif(rng) / xn;
    Vector y = random_gaussian(sp.dim(), rng);
    double yn = sp.norm(y);
    if (yn < 1e-12) {
      y.setZero();
      y[0] = 1.0;
      y /= sp.norm(y);
    } else {
      y /= yn;
    }
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
  }

  for (double u : u_grid) {
    double rho = 0.0;
    if (u > 0.0) {
      for (int i = 0; i < n_samples; ++i) {
        double val = energy.eval(xs[i] + u * ys[i]) +
                     energy.eval(xs[i] - u * ys[i]) -
                     2.0 * energy.eval(xs[i]);
        rho = std::max(rho, 0.5 * std::abs(val));
      }
    }
    bool ok = rho <= energy.gamma * std::pow(u, energy.q) + 1e-12;
    if (!ok) table.dominated = false;
    table.points.push_back({u, rho});
  }
  return table;
}

EquivalenceReport check_equivalence_co(const Vector& f0,
                                       const Dictionary& dict,
                                       const SmoothSpace& sp,
                                       const GreedyConfig& cfg,
                                       double tie_tol, double energy_tol) {
  if (sp.p() != 2.0)
    throw std::invalid_argument("check_equivalence_co: requires p = 2");
  Trace t1 = run_wcga(f0, dict, sp, cfg);
  Energy energy = make_quadratic_energy(f0);
  DescentTrace t2 = run_wcga_co(energy, dict, sp, cfg);

  EquivalenceReport rep;
  rep.identical = true;
  size_t n = std::min(t1.rows.size(), t2.rows.size());
  rep.steps_compared = int(n);

  Vector f = f0;
  std::vector<int> order;
  std::vector<char> in_set(dict.size(), 0);
  bool tie_stop = false;

  for (size_t k = 0; k < n; ++k) {
    int i1 = t1.rows[k].selected_index;
    int i2 = t2.rows[k].selected_index;
    if (i1 != i2) {
      double fn = f.norm();
      Vector v = dict.atoms().transpose() * (f / std::max(fn, 1e-300));
      double a = std::abs(v[std::abs(i1) - 1]);
      double b = std::abs(v[std::abs(i2) - 1]);
      if (std::abs(a - b) <= tie_tol) {
        ++rep.tie_tolerated;
        rep.steps_compared = int(k + 1);
        tie_stop = true;
      } else {
        rep.identical = false;
        rep.first_mismatch = int(k + 1);
      }
      break;
    }
    double e1 = 0.5 * t1.rows[k].residual_norm * t1.rows[k].residual_norm;
    rep.max_energy_gap_diff =
        std::max(rep.max_energy_gap_diff, std::abs(e1 - t2.rows[k].energy));

    int j = std::abs(i1) - 1;
    if (!in_set[j]) {
      in_set[j] = 1;
      order.push_back(j);
    }
    Matrix sub(dict.dim(), order.size());
    for (size_t c = 0; c < order.size(); ++c) sub.col(c) = dict.atom(order[c]);
    f = f0 - sub * sub.completeOrthogonalDecomposition().solve(f0);
  }

  if (rep.identical && !tie_stop && t1.rows.size() != t2.rows.size()) {
    rep.identical = false;
    rep.first_mismatch = int(n + 1);
  }
  rep.pass = rep.identical && rep.max_energy_gap_diff <= energy_tol;
  return rep;
}

// --- descent trace CSV --------------------------------------------------

void DescentTrace::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("DescentTrace::save_csv: cannot open " +
                             path.string());
  out << "# initial_energy=" << format_g17(initial_energy)
      << " optimum_reached=" << (optimum_reached ? 1 : 0);
  if (proof_B) out << " proof_B=" << format_g17(*proof_B);
  out << "\n";
  out << "iter,selected_index,energy,energy_gap\n";
  for (const auto& r : rows)
    out << r.iter << "," << r.selected_index << "," << format_g17(r.energy)
        << "," << format_g17(r.energy_gap) << "\n";
}

DescentTrace DescentTrace::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("DescentTrace::load_csv: cannot open " +
                             path.string());
  DescentTrace tr;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("DescentTrace::load_csv: empty file");
  if (!line.empty() && line[0] == '#') {
    std::istringstream ss(line.substr(1));
    std::string tok;
    while (ss >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq);
      std::string val = tok.substr(eq + 1);
      if (key == "initial_energy")
        tr.initial_energy = std::strtod(val.c_str(), nullptr);
      else if (key == "optimum_reached")
        tr.optimum_reached = val == "1";
      else if (key == "proof_B")
        tr.proof_B = std::strtod(val.c_str(), nullptr);
    }
    if (!std::getline(in, line))
      throw std::invalid_argument("DescentTrace::load_csv: missing header");
  }
  if (line != "iter,selected_index,energy,energy_gap")
    throw std::invalid_argument("DescentTrace::load_csv: unexpected header '" +
                                line + "'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    DescentRow row;
    const char* p = line.c_str();
    char* end = nullptr;
    row.iter = int(std::strtol(p, &end, 10));
    if (end == p || *end != ',')
      throw std::invalid_argument("DescentTrace::load_csv: bad row '" + line +
                                  "'");
    p = end + 1;
    row.selected_index = int(std::strtol(p, &end, 10));
    if (end == p || *end != ',')
      throw std::invalid_argument("DescentTrace::load_csv: bad row '" + line +
                                  "'");
    p = end + 1;
    row.energy = std::strtod(p, &end);
    if (end == p || *end != ',')
      throw std::invalid_argument("DescentTrace::load_csv: bad row '" + line +
                                  "'");
    p = end + 1;
    row.energy_gap = std::strtod(p, &end);
    if (end == p)
      throw std::invalid_argument("DescentTrace::load_csv: bad row '" + line +
                                  "'");
    tr.rows.push_back(row);
  }
  return tr;
}

}  // namespace gdesc
