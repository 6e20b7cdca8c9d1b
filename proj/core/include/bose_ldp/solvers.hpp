#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "bose_ldp/model.hpp"

namespace bose_ldp {

// ---- ideal and CMF -------------------------------------------------------

OccupationVector ideal_minimizer(const CycleWeightTable& w);

// Gamma = W_0(a beta qbar) / (a beta); equals qbar at a = 0.
double cmf_gamma(const CycleWeightTable& w, double a);
OccupationVector cmf_minimizer(const CycleWeightTable& w, double a);

// ---- PMF -----------------------------------------------------------------

enum class PmfRegime { below_mu_over_a, above_mu_over_a, saturated };
std::string_view to_string(PmfRegime regime);

struct FixedPointSolution {
  double delta_star = 0.0;
  PmfRegime regime = PmfRegime::above_mu_over_a;
  double residual = 0.0;  // |delta* - h(delta*)|
  int iterations = 0;
};

// h(delta) = rho(alpha + min(mu - a delta, 0)).
double pmf_h(double delta, const ModelParams& params, const CycleWeightTable& w);
FixedPointSolution pmf_delta_star(const ModelParams& params, const CycleWeightTable& w);
OccupationVector pmf_minimizer(const ModelParams& params, const CycleWeightTable& w);
OccupationVector pmf_minimizer(const ModelParams& params, const CycleWeightTable& w,
                               const FixedPointSolution& fp);

// ---- HYL -----------------------------------------------------------------

// Per-k Lambert branch choice: all principal, or lower branch at one index.
struct BranchPattern {
  std::optional<std::size_t> lower_index;

  static BranchPattern principal() { return {}; }
  static BranchPattern lower_at(std::size_t k) { return {k}; }
  bool all_principal() const { return !lower_index.has_value(); }
};

enum class HylLabel { xi0, xi1, xi2 };
std::string_view to_string(HylLabel label);

struct HylBranchSolution {
  double delta_star = 0.0;
  BranchPattern chi;
  OccupationVector xi;
  double objective = 0.0;  // I_alpha + H_lsc at xi, tail included
  HylLabel label = HylLabel::xi0;
  double residual = 0.0;  // |delta* - g(delta*)|
};

// Exponent rate c(delta): the Lambert argument for cycle k is
// -b beta k^2 q_k exp(beta k c(delta)).
double hyl_exponent_rate(double delta, const ModelParams& params);

// g^chi(delta); empty when some Lambert argument falls below -1/e.
std::optional<double> hyl_g(double delta, const BranchPattern& chi,
                            const ModelParams& params, const CycleWeightTable& w);

// h~(x) for x <= 0, principal branch throughout; g^0(delta) = h~(delta - mu/a)
// for delta <= mu/a.
std::optional<double> htilde(double x, const ModelParams& params, const CycleWeightTable& w);

// Candidate minimizer at a root delta of delta = g^chi(delta).
HylBranchSolution hyl_candidate(double delta, const BranchPattern& chi,
                                const ModelParams& params, const CycleWeightTable& w);

// F at the stationary point parameterised by delta, in closed form.
double hyl_objective_at(double delta, const ModelParams& params, const CycleWeightTable& w);

// All roots of delta = g^0(delta), sorted by decreasing delta.
std::vector<HylBranchSolution> hyl_solve_branch0(const ModelParams& params,
                                                 const CycleWeightTable& w);

// Upper bound on b under which chi != 0 stationary points cannot minimise.
double hyl_b_bound(const ModelParams& params, const CycleWeightTable& w);

// Global minimiser among branch-0 roots. Throws RegimeError when b is not
// below hyl_b_bound or when no root exists.
HylBranchSolution hyl_minimizer(const ModelParams& params, const CycleWeightTable& w);
// Same, from an already computed root list.
HylBranchSolution hyl_select(const std::vector<HylBranchSolution>& roots);

struct CriticalParams {
  double mu_p = 0.0;
  double mu_tang = 0.0;
  std::optional<double> mu_star;
  double beta_star = 0.0;  // NaN for d = 2
  double b_star = 0.0;
  bool dge5_condition_holds = false;
  double x_tang = 0.0;          // argmin of h~(x) - x over x <= 0
  double slope_at_peak = 0.0;   // one-sided slope of g^0 at delta = mu/a from below
  double mu_star_gap = 0.0;     // |P^0 - P^2| at the returned mu*
};

CriticalParams critical_params(const ModelParams& params, const CycleWeightTable& w);

// P^j(mu) for the high-density (xi0) and low-density (xi2) branches, found by
// bracketed solves. Requires mu_tang <= mu <= mu_p.
struct HylBranchPair {
  HylBranchSolution high;
  HylBranchSolution low;
};
HylBranchPair hyl_coexisting_branches(const ModelParams& params, const CycleWeightTable& w,
                                      double x_tang);

}  // namespace bose_ldp
