#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/solvers.hpp"
#include "bose_ldp/special_functions.hpp"

namespace bose_ldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInvE = 0.36787944117144232159552377016146;
constexpr std::size_t kScanNodes = 1000;  // per piece

void check_compatible(const ModelParams& params, const CycleWeightTable& w) {
  params.validate_hyl();
  const ModelParams& wp = w.params();
  if (wp.d != params.d || wp.beta != params.beta || wp.alpha != params.alpha) {
    throw ParameterError("weight table was built for different (d, beta, alpha)");
  }
}

double bose_g_or_inf(double n, double t) {
  if (t == 0.0 && n <= 1.0) return kInf;
  return bose_g(n, t);
}

struct SeriesSums {
  bool ok = true;
  double density = 0.0;  // sum k xi_k
  double count = 0.0;    // sum xi_k
  double square = 0.0;   // sum k^2 xi_k^2
};

// Stationary xi_k = -W(-y_k) / (b beta k^2), y_k = b beta k^2 q_k e^{beta k c},
// c <= -alpha. Entries beyond K use W_0(-y) = -y - y^2 + O(y^3) summed in
// closed form through bose_g minus the matching partial sums.
SeriesSums stationary_sums(double c, const BranchPattern& chi, const ModelParams& params,
                           const CycleWeightTable& w, std::vector<double>* xi) {
  const double beta = params.beta;
  const double bb = params.b * beta;
  const auto q = w.q();
  const std::size_t K = q.size();
  if (chi.lower_index && (*chi.lower_index < 1 || *chi.lower_index > K)) {
    throw ParameterError("lower-branch index outside 1..K");
  }
  if (xi) xi->assign(K, 0.0);

  SeriesSums s;
  double p1 = 0.0, p2 = 0.0, c1 = 0.0, c2 = 0.0;
  const double ratio = std::exp(beta * c);
  double growth = 1.0;
  for (std::size_t i = 0; i < K; ++i) {
    const double k = static_cast<double>(i + 1);
    growth = (i % 64 == 0) ? std::exp(beta * c * k) : growth * ratio;
    const double qe = q[i] * growth;
    const double k2 = k * k;
    double y = bb * k2 * qe;
    if (y > kInvE) {
      if (y > kInvE * (1.0 + 4.0 * kEps)) {
        s.ok = false;
        return s;
      }
      y = kInvE;
    }
    const Branch branch =
        (chi.lower_index && *chi.lower_index == i + 1) ? Branch::lower : Branch::principal;
    const double x = -lambert_w(branch, -y) / (bb * k2);
    if (xi) (*xi)[i] = x;
    s.density += k * x;
    s.count += x;
    s.square += k2 * x * x;
    p1 += k * qe;
    c1 += qe;
    const double sq = k2 * qe * qe;
    c2 += sq;
    p2 += k * sq;
  }
  if (w.truncated()) return s;

  const double t = -beta * (params.alpha + c);
  const double lambda = w.lambda();
  const double d = params.d;
  if (d < 2.0 && t > 0.0) {
    // y_k peaks at k = (1 - d/2)/t when that lies beyond K
    const double kpeak = (1.0 - 0.5 * d) / t;
    if (kpeak > static_cast<double>(K)) {
      const double ypeak = bb * lambda * std::pow(kpeak, 1.0 - 0.5 * d) * std::exp(-t * kpeak);
      if (ypeak > kInvE) {
        s.ok = false;
        return s;
      }
    }
  }
  const double g_sq = lambda * lambda * bose_g_or_inf(d, 2.0 * t) - c2;
  s.density += (lambda * bose_g_or_inf(0.5 * d, t) - p1) +
               bb * (lambda * lambda * bose_g_or_inf(d - 1.0, 2.0 * t) - p2);
  s.count += (lambda * bose_g_or_inf(1.0 + 0.5 * d, t) - c1) + bb * g_sq;
  s.square += g_sq;
  return s;
}

double objective_from_sums(double delta, const SeriesSums& s, const ModelParams& params,
                           const CycleWeightTable& w) {
  const double a = params.a, b = params.b, mu = params.mu;
  double quad;
  if (a * delta >= mu) {
    quad = -0.5 * a * delta * delta;
  } else {
    quad = a * b / (2.0 * (a - b)) * delta * delta - mu * mu / (2.0 * (a - b));
  }
  return (w.qbar() - s.count) / params.beta + 0.5 * b * s.square + quad;
}

std::optional<double> g0(double delta, const ModelParams& params, const CycleWeightTable& w) {
  const SeriesSums s =
      stationary_sums(hyl_exponent_rate(delta, params), BranchPattern::principal(), params, w, nullptr);
  if (!s.ok) return std::nullopt;
  return s.density;
}

std::optional<double> phi(double delta, const ModelParams& params, const CycleWeightTable& w) {
  const auto g = g0(delta, params, w);
  if (!g) return std::nullopt;
  return delta - *g;
}

// Linear nodes plus nodes geometrically clustered at one end.
std::vector<double> hybrid_grid(double lo, double hi, bool cluster_at_hi) {
  std::vector<double> nodes;
  nodes.reserve(kScanNodes + 2);
  const std::size_t half = kScanNodes / 2;
  const double width = hi - lo;
  for (std::size_t i = 0; i <= half; ++i) {
    nodes.push_back(lo + width * static_cast<double>(i) / static_cast<double>(half));
  }
  for (std::size_t i = 0; i < half; ++i) {
    const double frac = std::pow(10.0, -14.0 + 14.0 * static_cast<double>(i) / half);
    nodes.push_back(cluster_at_hi ? hi - width * frac : lo + width * frac);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

template <class F>
double bisect(F&& f, double lo, double hi, double f_lo) {
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
    const double mid = 0.5 * (lo + hi);
    const auto fm = f(mid);
    if (!fm) throw RegimeError("root bracket crosses a Lambert domain violation");
    if (*fm == 0.0) return mid;
    if ((*fm < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = *fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void scan_roots(const std::vector<double>& nodes, const ModelParams& params,
                const CycleWeightTable& w, std::vector<double>& roots) {
  const auto f = [&](double delta) { return phi(delta, params, w); };
  bool have_prev = false;
  double prev_x = 0.0, prev_f = 0.0;
  for (double x : nodes) {
    const auto fx = f(x);
    if (!fx) {
      have_prev = false;
      continue;
    }
    if (*fx == 0.0) {
      roots.push_back(x);
    } else if (have_prev && prev_f != 0.0 && ((prev_f < 0.0) != (*fx < 0.0))) {
      roots.push_back(bisect(f, prev_x, x, prev_f));
    }
    have_prev = true;
    prev_x = x;
    prev_f = *fx;
  }
}

// Minimiser of a unimodal function on [lo, hi]; non-finite values count as +inf.
template <class F>
double golden_min(F&& f, double lo, double hi) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= 4.0 * kEps * std::max({std::abs(lo), std::abs(hi), 1e-300})) break;
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

double right_root(const ModelParams& params, const CycleWeightTable& w) {
  const double lo = std::max(params.mu / params.a, 0.0);
  const auto f = [&](double delta) { return phi(delta, params, w); };
  const auto f_lo = f(lo);
  if (!f_lo) throw RegimeError("g0 undefined at delta = mu/a");
  if (*f_lo >= 0.0) {
    if (*f_lo == 0.0) return lo;
    throw RegimeError("no high-density root: mu is above mu_p");
  }
  const double hi = lo - *f_lo;  // g0(lo) bounds g0 on the right piece
  const auto f_hi = f(hi);
  if (!f_hi || *f_hi < 0.0) throw RegimeError("failed to bracket the high-density root");
  return bisect(f, lo, hi, *f_lo);
}

double low_root(const ModelParams& params, const CycleWeightTable& w, double x_tang) {
  const double hi = params.mu / params.a + x_tang;
  if (hi < 0.0) throw RegimeError("no low-density root: mu is below mu_tang");
  const auto f = [&](double delta) { return phi(delta, params, w); };
  const auto f_lo = f(0.0);
  const auto f_hi = f(hi);
  if (!f_lo || !f_hi || *f_hi < 0.0 || *f_lo > 0.0) {
    throw RegimeError("failed to bracket the low-density root");
  }
  if (*f_hi == 0.0) return hi;
  return bisect(f, 0.0, hi, *f_lo);
}

}  // namespace

std::string_view to_string(HylLabel label) {
  switch (label) {
    case HylLabel::xi0: return "xi0";
    case HylLabel::xi1: return "xi1";
    case HylLabel::xi2: return "xi2";
  }
  return "unknown";
}

double hyl_exponent_rate(double delta, const ModelParams& params) {
  const double excess = params.mu - params.a * delta;
  if (excess <= 0.0) return excess;
  return -params.b / (params.a - params.b) * excess;
}

std::optional<double> hyl_g(double delta, const BranchPattern& chi, const ModelParams& params,
                            const CycleWeightTable& w) {
  check_compatible(params, w);
  const SeriesSums s = stationary_sums(hyl_exponent_rate(delta, params), chi, params, w, nullptr);
  if (!s.ok) return std::nullopt;
  return s.density;
}

std::optional<double> htilde(double x, const ModelParams& params, const CycleWeightTable& w) {
  check_compatible(params, w);
  if (x > 0.0) throw DomainError("htilde requires x <= 0");
  const double c = params.a * params.b / (params.a - params.b) * x;
  const SeriesSums s = stationary_sums(c, BranchPattern::principal(), params, w, nullptr);
  if (!s.ok) return std::nullopt;
  return s.density;
}

double hyl_objective_at(double delta, const ModelParams& params, const CycleWeightTable& w) {
  check_compatible(params, w);
  const SeriesSums s = stationary_sums(hyl_exponent_rate(delta, params),
                                       BranchPattern::principal(), params, w, nullptr);
  if (!s.ok) throw RegimeError("stationary point undefined at this delta");
  return objective_from_sums(delta, s, params, w);
}

HylBranchSolution hyl_candidate(double delta, const BranchPattern& chi, const ModelParams& params,
                                const CycleWeightTable& w) {
  check_compatible(params, w);
  std::vector<double> xi;
  const SeriesSums s = stationary_sums(hyl_exponent_rate(delta, params), chi, params, w, &xi);
  if (!s.ok) throw RegimeError("stationary point undefined at this delta");
  HylBranchSolution out;
  out.delta_star = delta;
  out.chi = chi;
  out.xi = OccupationVector(std::move(xi));
  out.objective = objective_from_sums(delta, s, params, w);
  out.residual = std::abs(delta - s.density);
  out.label = params.a * delta > params.mu ? HylLabel::xi0 : HylLabel::xi1;
  return out;
}

std::vector<HylBranchSolution> hyl_solve_branch0(const ModelParams& params,
                                                 const CycleWeightTable& w) {
  check_compatible(params, w);
  const double mu_a = params.mu / params.a;
  std::vector<double> left, right;
  double left_peak = 0.0;
  if (mu_a > 0.0) {
    // phi is concave on [0, mu/a]; its peak separates the two possible roots.
    const auto neg_phi = [&](double delta) {
      const auto f = phi(delta, params, w);
      return f ? -*f : kInf;
    };
    left_peak = golden_min(neg_phi, 0.0, mu_a);
    auto nodes = hybrid_grid(0.0, mu_a, true);
    nodes.push_back(left_peak);
    std::sort(nodes.begin(), nodes.end());
    scan_roots(nodes, params, w, left);
  }
  const double lo = std::max(mu_a, 0.0);
  const auto g_lo = g0(lo, params, w);
  if (g_lo && *g_lo > lo) {
    scan_roots(hybrid_grid(lo, *g_lo, false), params, w, right);
  }

  std::vector<double> all;
  for (double r : right) all.push_back(r);
  for (double r : left) all.push_back(r);
  std::sort(all.begin(), all.end(), std::greater<>());
  all.erase(std::unique(all.begin(), all.end(),
                        [](double x, double y) {
                          return std::abs(x - y) <= 1e-13 * std::max(std::abs(x), 1e-300);
                        }),
            all.end());

  std::vector<HylBranchSolution> out;
  std::size_t n_left = 0;
  for (double r : all) n_left += (r <= mu_a) ? 1 : 0;
  for (double r : all) {
    HylBranchSolution sol = hyl_candidate(r, BranchPattern::principal(), params, w);
    if (r > mu_a) {
      sol.label = HylLabel::xi0;
    } else if (n_left >= 2) {
      sol.label = (r == all[all.size() - 1]) ? HylLabel::xi2 : HylLabel::xi1;
    } else {
      sol.label = r >= left_peak ? HylLabel::xi1 : HylLabel::xi2;
    }
    out.push_back(std::move(sol));
  }
  return out;
}

double hyl_b_bound(const ModelParams& params, const CycleWeightTable& w) {
  check_compatible(params, w);
  const auto h0 = htilde(0.0, params, w);
  if (!h0) return 0.0;
  const double mu_p = params.a * *h0;
  return std::min(params.a,
                  std::exp(-params.beta * mu_p / params.a) / (params.beta * w.q(1)));
}

HylBranchSolution hyl_select(const std::vector<HylBranchSolution>& roots) {
  if (roots.empty()) throw RegimeError("no stationary point of the HYL objective");
  const auto best = std::min_element(
      roots.begin(), roots.end(),
      [](const HylBranchSolution& x, const HylBranchSolution& y) { return x.objective < y.objective; });
  return *best;
}

HylBranchSolution hyl_minimizer(const ModelParams& params, const CycleWeightTable& w) {
  check_compatible(params, w);
  const double bound = hyl_b_bound(params, w);
  if (!(params.b < bound)) {
    throw RegimeError("b = " + message_number(params.b) + " is not below min{a, e^{-beta mu_p/a}/(beta q_1)} = " +
                      message_number(bound) +
                      "; stationary points on other Lambert branches cannot be excluded");
  }
  return hyl_select(hyl_solve_branch0(params, w));
}

HylBranchPair hyl_coexisting_branches(const ModelParams& params, const CycleWeightTable& w,
                                      double x_tang) {
  check_compatible(params, w);
  HylBranchPair pair{
      hyl_candidate(right_root(params, w), BranchPattern::principal(), params, w),
      hyl_candidate(low_root(params, w, x_tang), BranchPattern::principal(), params, w)};
  pair.high.label = HylLabel::xi0;
  pair.low.label = HylLabel::xi2;
  return pair;
}

CriticalParams critical_params(const ModelParams& params, const CycleWeightTable& w) {
  check_compatible(params, w);
  const double a = params.a, b = params.b, beta = params.beta;
  const int d = params.d;
  CriticalParams cp;
  cp.b_star = std::pow(4.0 * std::numbers::pi * beta, 0.5 * d) / (std::numbers::e * beta);
  cp.beta_star = d == 2 ? std::numeric_limits<double>::quiet_NaN()
                        : std::pow(std::pow(std::numbers::e * b, 2.0) /
                                       std::pow(4.0 * std::numbers::pi, d),
                                   1.0 / (d - 2.0));

  const auto h0 = htilde(0.0, params, w);
  if (!h0) throw RegimeError("h~(0) undefined: Lambert argument below -1/e at x = 0");
  cp.mu_p = a * *h0;

  // h~(x) - x is convex; its minimum over x <= 0 lies in [-h~(0), 0].
  const auto psi = [&](double x) {
    const auto h = htilde(x, params, w);
    return h ? *h - x : kInf;
  };
  std::vector<double> xs;
  constexpr int kGrid = 400;
  for (int i = 0; i < kGrid; ++i) {
    xs.push_back(-*h0 * std::pow(10.0, -15.0 * i / (kGrid - 1.0)));
  }
  xs.push_back(0.0);
  std::size_t best = 0;
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    vals[i] = psi(xs[i]);
    if (vals[i] < vals[best]) best = i;
  }
  double x_tang = xs[best];
  double psi_min = vals[best];
  if (best + 1 < xs.size()) {
    const double lo = xs[best == 0 ? 0 : best - 1];
    const double hi = xs[best + 1];
    const double x = golden_min(psi, lo, hi);
    const double v = psi(x);
    if (v < psi_min) {
      x_tang = x;
      psi_min = v;
    }
  }
  cp.x_tang = x_tang;
  cp.mu_tang = std::min(a * psi_min, cp.mu_p);

  const double step = 1e-7 * std::max(*h0, 1e-300);
  const auto h_minus = htilde(-step, params, w);
  cp.slope_at_peak = h_minus ? (*h0 - *h_minus) / step : kInf;
  cp.dge5_condition_holds = cp.slope_at_peak > 1.0;

  const bool hypotheses = d >= 3 && (d < 5 || cp.dge5_condition_holds) &&
                          cp.mu_tang < cp.mu_p && b < hyl_b_bound(params, w);
  if (!hypotheses) return cp;

  // s(mu) = P^2 - P^0 = F^0 - F^2, negative at mu_tang and positive at mu_p.
  const auto gap = [&](double mu) {
    ModelParams p = params;
    p.mu = mu;
    const HylBranchPair pair = hyl_coexisting_branches(p, w, x_tang);
    return pair.high.objective - pair.low.objective;
  };
  double lo = cp.mu_tang, hi = cp.mu_p;
  double s_lo, s_hi;
  try {
    s_lo = gap(lo);
    s_hi = gap(hi);
  } catch (const RegimeError&) {
    return cp;
  }
  if (!(s_lo < 0.0 && s_hi > 0.0)) return cp;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const double s = gap(mid);
    if (s < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  cp.mu_star = 0.5 * (lo + hi);
  cp.mu_star_gap = std::abs(gap(*cp.mu_star));
  return cp;
}

}  // namespace bose_ldp
