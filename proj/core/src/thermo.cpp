#include "bose_ldp/thermo.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/solvers.hpp"
#include "bose_ldp/special_functions.hpp"
#include "parallel.hpp"

namespace bose_ldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kCoexistenceTol = 1e-12;

// Closed-form sums never touch q_k, so one cycle is enough.
CycleWeightTable closed_form(const ModelParams& params) { return make_weights(params, 1); }

ModelParams with_alpha(ModelParams p, double alpha) {
  p.alpha = alpha;
  return p;
}

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// Smallest gamma in (-inf, 0] bracket with f(gamma) <= target, f increasing.
template <class F>
double solve_increasing(F&& f, double target, double lo, double hi) {
  while (f(lo) > target) {
    hi = lo;
    lo *= 2.0;
    if (!std::isfinite(lo)) throw DomainError("no bracket for the inner chemical potential");
  }
  for (int it = 0; it < 400; ++it) {
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) || hi - lo < 1e-300) break;
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct HylState {
  std::vector<HylBranchSolution> roots;
  std::vector<const HylBranchSolution*> minimizers;  // objective within tolerance of the min
};

HylState hyl_state(const ModelParams& params, const CycleWeightTable& w) {
  const double bound = hyl_b_bound(params, w);
  if (!(params.b < bound)) {
    throw RegimeError("b is not below min{a, e^{-beta mu_p/a}/(beta q_1)} = " +
                      message_number(bound));
  }
  HylState st;
  st.roots = hyl_solve_branch0(params, w);
  if (st.roots.empty()) throw RegimeError("no stationary point of the HYL objective");
  double best = kInf;
  for (const auto& r : st.roots) best = std::min(best, r.objective);
  for (const auto& r : st.roots) {
    if (r.objective <= best + kCoexistenceTol) st.minimizers.push_back(&r);
  }
  return st;
}

// Uses delta_star rather than D(xi): xi stops at K, delta_star includes the tail.
double hyl_dp_dmu(const HylBranchSolution& s, const ModelParams& p) {
  const double delta = s.delta_star;
  return delta + positive_part(p.mu - p.a * delta) / (p.a - p.b);
}

}  // namespace

// ---- ideal --------------------------------------------------------------

double pressure_ideal(const ModelParams& params) {
  params.validate();
  return closed_form(params).qbar() / params.beta;
}

double density_ideal(const ModelParams& params) {
  params.validate();
  return closed_form(params).rho();
}

double rho_critical(const ModelParams& params) {
  params.validate();
  if (params.d <= 2) return kInf;
  return thermal_prefactor(params.d, params.beta) * riemann_zeta(0.5 * params.d);
}

double chemical_potential_ideal(const ModelParams& params, double rho) {
  params.validate();
  if (!(rho > 0.0) || !(rho < rho_critical(params))) {
    throw ParameterError("chemical potential requires 0 < rho < rho_c");
  }
  const auto density = [&](double gamma) { return density_ideal(with_alpha(params, gamma)); };
  return solve_increasing(density, rho, -1e3, 0.0);
}

double free_energy_ideal(const ModelParams& params, double rho) {
  params.validate();
  if (!(rho >= 0.0)) throw ParameterError("density must be >= 0");
  if (rho == 0.0) return 0.0;
  if (rho >= rho_critical(params)) return -pressure_ideal(with_alpha(params, 0.0));
  const double gamma = chemical_potential_ideal(params, rho);
  return gamma * rho - pressure_ideal(with_alpha(params, gamma));
}

// ---- CMF ----------------------------------------------------------------

double pressure_cmf(const ModelParams& params) {
  params.validate();
  const double qbar = closed_form(params).qbar();
  if (params.a == 0.0) return qbar / params.beta;
  const double W = lambert_w(Branch::principal, params.a * params.beta * qbar);
  return W * (1.0 + 0.5 * W) / (params.a * params.beta * params.beta);
}

double density_cmf(const ModelParams& params) {
  params.validate();
  const auto w = closed_form(params);
  return cmf_gamma(w, params.a) / w.qbar() * w.rho();
}

double rho_critical_cmf(const ModelParams& params) {
  params.validate();
  const double rc = rho_critical(params);
  if (!std::isfinite(rc)) return kInf;
  const auto w0 = closed_form(with_alpha(params, 0.0));
  return cmf_gamma(w0, params.a) / w0.qbar() * rc;
}

double free_energy_cmf(const ModelParams& params, double rho) {
  params.validate();
  if (!(rho >= 0.0)) throw ParameterError("density must be >= 0");
  if (rho == 0.0) return 0.0;
  if (rho >= rho_critical_cmf(params)) return -pressure_cmf(with_alpha(params, 0.0));
  const auto density = [&](double alpha) { return density_cmf(with_alpha(params, alpha)); };
  const double alpha = solve_increasing(density, rho, -1e3, 0.0);
  return alpha * rho - pressure_cmf(with_alpha(params, alpha));
}

// ---- PMF ----------------------------------------------------------------

double pressure_pmf(const ModelParams& params) {
  const auto w = closed_form(params);
  const FixedPointSolution fp = pmf_delta_star(params, w);
  if (fp.regime == PmfRegime::saturated) {
    return w.qbar() / params.beta + params.mu * params.mu / (2.0 * params.a);
  }
  const double shift = params.mu - params.a * fp.delta_star;
  return 0.5 * params.a * fp.delta_star * fp.delta_star + w.weight_sum(shift) / params.beta;
}

double density_pmf(const ModelParams& params) {
  const FixedPointSolution fp = pmf_delta_star(params, closed_form(params));
  return fp.regime == PmfRegime::saturated ? params.mu / params.a : fp.delta_star;
}

double pressure_pmf_dalpha(const ModelParams& params) {
  return pmf_delta_star(params, closed_form(params)).delta_star;
}

double free_energy_pmf(const ModelParams& params, double rho) {
  return free_energy_ideal(params, rho) + 0.5 * params.a * rho * rho;
}

// ---- HYL ----------------------------------------------------------------

double pressure_hyl(const ModelParams& params, std::size_t K) {
  const auto w = make_weights(params, K);
  return w.qbar() / params.beta - hyl_minimizer(params, w).objective;
}

OneSided density_hyl(const ModelParams& params, std::size_t K) {
  const auto w = make_weights(params, K);
  const HylState st = hyl_state(params, w);
  OneSided out;
  out.left = kInf;
  out.right = -kInf;
  for (const auto* m : st.minimizers) {
    const double slope = hyl_dp_dmu(*m, params);
    out.left = std::min(out.left, slope);
    out.right = std::max(out.right, slope);
  }
  return out;
}

// ---- density large deviations -------------------------------------------

double log_mgf(const ModelParams& params, double t) {
  params.validate();
  if (!std::isfinite(t)) throw ParameterError("t must be finite");
  if (params.alpha + t > 0.0) return kInf;
  const auto w = closed_form(params);
  return (w.weight_sum(t) - w.qbar()) / params.beta;
}

double density_rate_J(const ModelParams& params, double x) {
  params.validate();
  if (!(x >= 0.0) || x > rho_critical(params)) return kInf;
  return pressure_ideal(params) + free_energy_ideal(params, x) - params.alpha * x;
}

double density_rate_J_pmf(const ModelParams& params, double x) {
  params.validate();
  if (!(params.a > 0.0)) throw ParameterError("PMF requires a > 0");
  const auto shifted = [&](double y) {
    return density_rate_J(params, y) - params.mu * y + 0.5 * params.a * y * y;
  };
  const double j = shifted(x);
  if (!std::isfinite(j)) return kInf;
  // N = inf_y of the convex function above, by golden section.
  double lo = 0.0;
  double hi = rho_critical(params);
  if (!std::isfinite(hi)) {
    hi = 4.0 * std::max({density_ideal(params), params.mu / params.a, 1.0});
  }
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = shifted(x1), f2 = shifted(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    if (f1 <= f2) {
      hi = x2; x2 = x1; f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = shifted(x1);
    } else {
      lo = x1; x1 = x2; f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = shifted(x2);
    }
  }
  const double N = std::min({f1, f2, shifted(0.0), shifted(lo), shifted(hi)});
  return j - N;
}

// ---- condensates --------------------------------------------------------

double condensate_ideal(const ModelParams& params) {
  params.validate();
  if (params.alpha < 0.0) return 0.0;
  return params.d <= 2 ? kInf : 0.0;
}

double condensate_cmf(const ModelParams& params) { return condensate_ideal(params); }

double condensate_pmf(const ModelParams& params) {
  params.validate();
  if (!(params.a > 0.0)) throw ParameterError("PMF requires a > 0");
  const double rho = density_ideal(params);
  if (!std::isfinite(rho)) return 0.0;
  return positive_part(params.mu / params.a - rho);
}

double condensate_hyl(const ModelParams& params, std::size_t K) {
  const auto w = make_weights(params, K);
  const HylState st = hyl_state(params, w);
  if (st.minimizers.size() > 1) {
    throw RegimeError("HYL pressure is not differentiable here (two coexisting minimisers)");
  }
  const double D = st.minimizers.front()->delta_star;
  return params.a / (params.a - params.b) * positive_part(params.mu / params.a - D);
}

// ---- sweeps -------------------------------------------------------------

Sweep Sweep::range(SweepVariable variable, double start, double stop, double step) {
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || !(step > 0.0)) {
    throw ParameterError("sweep needs finite start/stop and step > 0");
  }
  Sweep s;
  s.variable = variable;
  if (stop < start) return s;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 0.5));
  for (std::size_t i = 0; i <= n; ++i) s.grid.push_back(start + step * static_cast<double>(i));
  return s;
}

unsigned worker_count(unsigned requested) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BOSE_LDP_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

namespace {

PhaseScanRow scan_row(Model model, const ModelParams& p, SweepVariable var, std::size_t K) {
  PhaseScanRow row;
  row.sweep_value = var == SweepVariable::mu ? p.mu : p.alpha;
  const bool by_mu = var == SweepVariable::mu;
  switch (model) {
    case Model::ideal: {
      row.pressure = pressure_ideal(p);
      row.density_at_zero = density_ideal(p);
      row.dpressure = by_mu ? 0.0 : row.density_at_zero;
      row.condensate = condensate_ideal(p);
      row.n_minimizers = row.n_stationary = 1;
      row.regime_label = "unique";
      break;
    }
    case Model::cmf: {
      row.pressure = pressure_cmf(p);
      row.density_at_zero = density_cmf(p);
      row.dpressure = by_mu ? 0.0 : row.density_at_zero;
      row.condensate = condensate_cmf(p);
      row.n_minimizers = row.n_stationary = 1;
      row.regime_label = "unique";
      break;
    }
    case Model::pmf: {
      const auto w = closed_form(p);
      const FixedPointSolution fp = pmf_delta_star(p, w);
      row.pressure = pressure_pmf(p);
      row.density_at_zero = fp.delta_star;
      const bool saturated = fp.regime == PmfRegime::saturated;
      row.dpressure = by_mu ? (saturated ? p.mu / p.a : fp.delta_star) : fp.delta_star;
      row.condensate = condensate_pmf(p);
      row.residual = fp.residual;
      row.n_minimizers = row.n_stationary = 1;
      row.regime_label = std::string(to_string(fp.regime));
      if (std::isfinite(w.rho()) && p.mu == p.a * w.rho()) row.regime_label = "kink:saturation";
      break;
    }
    case Model::hyl: {
      const auto w = make_weights(p, K);
      const HylState st = hyl_state(p, w);
      row.n_stationary = static_cast<int>(st.roots.size());
      row.n_minimizers = static_cast<int>(st.minimizers.size());
      row.pressure = w.qbar() / p.beta - st.minimizers.front()->objective;
      double slope = 0.0, density = 0.0, residual = 0.0;
      for (const auto* m : st.minimizers) {
        slope += by_mu ? hyl_dp_dmu(*m, p) : m->delta_star;
        density += m->delta_star;
        residual = std::max(residual, m->residual);
      }
      const double n = static_cast<double>(st.minimizers.size());
      row.dpressure = slope / n;
      row.density_at_zero = density / n;
      row.condensate = p.a / (p.a - p.b) * positive_part(p.mu / p.a - row.density_at_zero);
      row.residual = residual;
      if (st.minimizers.size() > 1) {
        row.regime_label = "kink:coexistence";
      } else {
        row.regime_label = "unique:" + std::string(to_string(st.minimizers.front()->label));
      }
      break;
    }
  }
  return row;
}

}  // namespace

std::vector<PhaseScanRow> phase_scan(Model model, const ModelParams& tmpl, const Sweep& sweep,
                                     const ScanOptions& options) {
  for (std::size_t i = 1; i < sweep.grid.size(); ++i) {
    if (!(sweep.grid[i] > sweep.grid[i - 1])) {
      throw ParameterError("sweep grid must be strictly increasing");
    }
  }
  std::vector<PhaseScanRow> rows(sweep.grid.size());
  detail::parallel_for(rows.size(), worker_count(options.threads), [&](std::size_t i) {
    ModelParams p = tmpl;
    if (sweep.variable == SweepVariable::mu) {
      p.mu = sweep.grid[i];
    } else {
      p.alpha = sweep.grid[i];
    }
    try {
      rows[i] = scan_row(model, p, sweep.variable, options.K);
    } catch (const std::exception& e) {
      PhaseScanRow row;
      row.sweep_value = sweep.grid[i];
      row.pressure = row.dpressure = row.density_at_zero = row.condensate = row.residual = kNaN;
      row.regime_label = std::string("error: ") + e.what();
      rows[i] = std::move(row);
    }
  });
  return rows;
}

}  // namespace bose_ldp
