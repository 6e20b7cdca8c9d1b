#include <cmath>
#include <limits>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/solvers.hpp"
#include "bose_ldp/special_functions.hpp"

namespace bose_ldp {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::vector<double> tilted_weights(const CycleWeightTable& w, double shift) {
  std::vector<double> x(w.q().begin(), w.q().end());
  const double beta = w.params().beta;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] *= std::exp(beta * shift * static_cast<double>(i + 1));
  }
  return x;
}

}  // namespace

OccupationVector ideal_minimizer(const CycleWeightTable& w) {
  return OccupationVector(std::vector<double>(w.q().begin(), w.q().end()));
}

double cmf_gamma(const CycleWeightTable& w, double a) {
  if (a < 0.0) throw ParameterError("CMF coupling a must be >= 0");
  if (a == 0.0) return w.qbar();
  const double ab = a * w.params().beta;
  return lambert_w(Branch::principal, ab * w.qbar()) / ab;
}

OccupationVector cmf_minimizer(const CycleWeightTable& w, double a) {
  const double scale = cmf_gamma(w, a) / w.qbar();
  std::vector<double> x(w.q().begin(), w.q().end());
  for (double& v : x) v *= scale;
  return OccupationVector(std::move(x));
}

std::string_view to_string(PmfRegime regime) {
  switch (regime) {
    case PmfRegime::below_mu_over_a: return "below_mu_over_a";
    case PmfRegime::above_mu_over_a: return "above_mu_over_a";
    case PmfRegime::saturated: return "saturated";
  }
  return "unknown";
}

double pmf_h(double delta, const ModelParams& params, const CycleWeightTable& w) {
  return w.density_sum(std::min(params.mu - params.a * delta, 0.0));
}

FixedPointSolution pmf_delta_star(const ModelParams& params, const CycleWeightTable& w) {
  params.validate();
  if (!(params.a > 0.0)) throw ParameterError("PMF requires a > 0");
  const double rho = w.rho();
  FixedPointSolution out;
  if (std::isfinite(rho) && params.mu >= params.a * rho) {
    out.delta_star = rho;
    out.regime = PmfRegime::saturated;
    return out;
  }
  // phi(delta) = delta - h(delta) is strictly increasing; h is constant (and
  // above delta) on delta <= mu/a, so the root lies right of max(0, mu/a).
  const auto phi = [&](double delta) { return delta - pmf_h(delta, params, w); };
  double lo = std::max(0.0, params.mu / params.a);
  double hi;
  if (std::isfinite(rho)) {
    hi = rho;
  } else {
    hi = std::max(2.0 * lo, 1.0);
    while (phi(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) throw DomainError("pmf_delta_star: no bracket found");
    }
  }
  int it = 0;
  for (; it < 300 && hi - lo > 2.0 * kEps * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.delta_star = 0.5 * (lo + hi);
  out.iterations = it;
  out.residual = std::abs(phi(out.delta_star));
  out.regime = params.a * out.delta_star > params.mu ? PmfRegime::above_mu_over_a
                                                      : PmfRegime::below_mu_over_a;
  return out;
}

OccupationVector pmf_minimizer(const ModelParams& params, const CycleWeightTable& w,
                               const FixedPointSolution& fp) {
  return OccupationVector(
      tilted_weights(w, std::min(params.mu - params.a * fp.delta_star, 0.0)));
}

OccupationVector pmf_minimizer(const ModelParams& params, const CycleWeightTable& w) {
  return pmf_minimizer(params, w, pmf_delta_star(params, w));
}

}  // namespace bose_ldp
