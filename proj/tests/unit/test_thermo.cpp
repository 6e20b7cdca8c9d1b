#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/solvers.hpp"
#include "bose_ldp/special_functions.hpp"
#include "bose_ldp/thermo.hpp"
#include "oracles.hpp"

using namespace bose_ldp;

namespace {

constexpr double kUnitBeta = 1.0 / (4.0 * std::numbers::pi);
constexpr double kZeta32 = 2.6123753486854883433;
constexpr double kZeta52 = 1.3414872572509171798;

ModelParams params(double alpha, double mu = 0.0, double a = 0.0, double beta = kUnitBeta,
                   int d = 3) {
  ModelParams p;
  p.d = d;
  p.beta = beta;
  p.alpha = alpha;
  p.mu = mu;
  p.a = a;
  return p;
}

ModelParams hyl_reference(double mu) {
  ModelParams p = params(0.0, mu, 1.0, 1.0);
  p.b = 0.1;
  return p;
}

constexpr std::size_t kK = 10000;

// mu* of the reference HYL instance, computed once.
double reference_mu_star() {
  static const double mu_star = [] {
    const auto p = hyl_reference(0.0);
    return *critical_params(p, make_weights(p, kK)).mu_star;
  }();
  return mu_star;
}

}  // namespace

// ---- ideal ---------------------------------------------------------------

TEST(Ideal, CriticalDensity) {
  EXPECT_LT(oracle::rel_err(rho_critical(params(0.0)), kZeta32), 1e-12);
  EXPECT_TRUE(std::isinf(rho_critical(params(0.0, 0, 0, 1.0, 1))));
  EXPECT_TRUE(std::isinf(rho_critical(params(0.0, 0, 0, 1.0, 2))));
  EXPECT_LT(oracle::rel_err(pressure_ideal(params(0.0)), kZeta52 / kUnitBeta), 1e-12);
}

TEST(Ideal, PressureDerivativeIsDensity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, -0.01);
  for (int i = 0; i < 20; ++i) {
    const double alpha = u(rng);
    const double fd = oracle::central_difference(
        [&](double s) { return pressure_ideal(params(s)); }, alpha, 1e-5);
    EXPECT_LT(oracle::rel_err(fd, density_ideal(params(alpha))), 1e-5) << alpha;
  }
}

TEST(Ideal, FreeEnergyIsLegendreTransform) {
  for (double rho : {0.05, 0.3, 1.0, 2.0, 2.5}) {
    const auto p = params(0.0);
    const double sup = oracle::grid_max(
        [&](double s) { return s * rho - pressure_ideal(params(s)); }, -50.0, 0.0);
    EXPECT_NEAR(free_energy_ideal(p, rho), sup, 1e-7) << rho;
  }
}

TEST(Ideal, FreeEnergyConstantAboveCriticalDensity) {
  const auto p = params(0.0);
  const double rc = rho_critical(p);
  const double f0 = -pressure_ideal(p);
  for (double rho : {rc, 1.1 * rc, 3.0 * rc, 100.0 * rc}) {
    EXPECT_DOUBLE_EQ(free_energy_ideal(p, rho), f0);
  }
  EXPECT_NEAR(free_energy_ideal(p, rc * (1.0 - 1e-12)), f0, 1e-9);
  EXPECT_EQ(free_energy_ideal(p, 0.0), 0.0);
  EXPECT_THROW(free_energy_ideal(p, -1.0), ParameterError);
}

TEST(Ideal, ChemicalPotentialInvertsDensity) {
  const auto p = params(0.0);
  for (double gamma : {-5.0, -0.3, -1e-4}) {
    const double rho = density_ideal(params(gamma));
    EXPECT_NEAR(chemical_potential_ideal(p, rho), gamma, 1e-9 * std::max(1.0, -gamma));
  }
}

// ---- CMF -----------------------------------------------------------------

TEST(Cmf, SmallCouplingLimits) {
  for (double alpha : {-1.0, -0.1, 0.0}) {
    const auto ideal = params(alpha);
    const auto cmf = params(alpha, 0.0, 1e-10);
    EXPECT_LT(oracle::rel_err(pressure_cmf(cmf), pressure_ideal(ideal)), 1e-8);
    EXPECT_LT(oracle::rel_err(density_cmf(cmf), density_ideal(ideal)), 1e-8);
    EXPECT_LT(oracle::rel_err(rho_critical_cmf(cmf), rho_critical(ideal)), 1e-8);
    const auto w = make_weights(cmf, 10);
    const auto xi = cmf_minimizer(w, cmf.a);
    for (std::size_t k = 1; k <= 10; ++k) EXPECT_LT(oracle::rel_err(xi(k), w.q(k)), 1e-8);
  }
  EXPECT_EQ(pressure_cmf(params(-0.2)), pressure_ideal(params(-0.2)));
}

TEST(Cmf, PressureDerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, -0.01);
  for (int i = 0; i < 20; ++i) {
    const double alpha = i == 0 ? -0.5 : u(rng);
    const double a = 0.5 + i * 0.2;
    const double fd = oracle::central_difference(
        [&](double s) { return pressure_cmf(params(s, 0.0, a)); }, alpha, 1e-5);
    EXPECT_LT(oracle::rel_err(fd, density_cmf(params(alpha, 0.0, a))), 1e-6) << alpha;
  }
}

TEST(Cmf, CriticalDensityDecreasesWithCoupling) {
  double prev = rho_critical(params(0.0));
  for (double a : {0.01, 0.1, 1.0, 10.0}) {
    const double rc = rho_critical_cmf(params(0.0, 0.0, a));
    EXPECT_LT(rc, prev);
    prev = rc;
  }
  EXPECT_TRUE(std::isinf(rho_critical_cmf(params(0.0, 0.0, 1.0, 1.0, 2))));
}

TEST(Cmf, FreeEnergyIsLegendreTransform) {
  const double a = 0.7;
  const auto p = params(0.0, 0.0, a);
  for (double rho : {0.1, 0.8, 1.5}) {
    const double sup = oracle::grid_max(
        [&](double s) { return s * rho - pressure_cmf(params(s, 0.0, a)); }, -50.0, 0.0);
    EXPECT_NEAR(free_energy_cmf(p, rho), sup, 1e-7) << rho;
  }
  const double rc = rho_critical_cmf(p);
  EXPECT_DOUBLE_EQ(free_energy_cmf(p, 2.0 * rc), -pressure_cmf(p));
}

// ---- PMF -----------------------------------------------------------------

TEST(Pmf, SaturatedPressure) {
  for (double alpha : {-0.5, 0.0}) {
    const auto p = params(alpha, 10.0, 1.0);
    EXPECT_NEAR(pressure_pmf(p), pressure_ideal(p) + p.mu * p.mu / (2.0 * p.a), 1e-12);
    EXPECT_DOUBLE_EQ(density_pmf(p), p.mu / p.a);
  }
}

TEST(Pmf, PressureDerivativeMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 6.0);
  const double alpha = -0.3;
  const double mu_sat = density_ideal(params(alpha));
  int checked = 0;
  while (checked < 20) {
    const double mu = u(rng);
    if (std::abs(mu - mu_sat) < 1e-3) continue;
    const double fd = oracle::central_difference(
        [&](double m) { return pressure_pmf(params(alpha, m, 1.0)); }, mu, 1e-5);
    EXPECT_LT(oracle::rel_err(fd, density_pmf(params(alpha, mu, 1.0))), 1e-5) << mu;
    const double fd_alpha = oracle::central_difference(
        [&](double s) { return pressure_pmf(params(s, mu, 1.0)); }, alpha, 1e-5);
    EXPECT_LT(oracle::rel_err(fd_alpha, pressure_pmf_dalpha(params(alpha, mu, 1.0))), 1e-5);
    ++checked;
  }
}

TEST(Pmf, DerivativeContinuousAtSaturation) {
  const double alpha = -0.3;
  const double mu_sat = density_ideal(params(alpha));
  const double below = density_pmf(params(alpha, mu_sat - 1e-12, 1.0));
  const double above = density_pmf(params(alpha, mu_sat + 1e-12, 1.0));
  EXPECT_NEAR(below, above, 1e-10);
  EXPECT_NEAR(below, mu_sat, 1e-10);
}

TEST(Pmf, ConvexAndAboveIdealForPositiveMu) {
  const double alpha = -0.2;
  const double h = 0.01;
  std::vector<double> values;
  for (int i = 0; i <= 600; ++i) values.push_back(pressure_pmf(params(alpha, -2.0 + h * i, 1.0)));
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    EXPECT_GE(values[i - 1] - 2.0 * values[i] + values[i + 1], -1e-8) << i;
  }
  // at x = q the tilt contributes mu rho - (a/2) rho^2, so p^PMF >= p once mu >= a rho / 2
  const double p0 = pressure_ideal(params(alpha));
  const double mu_half = 0.5 * density_ideal(params(alpha));
  for (int i = 0; i <= 600; ++i) {
    if (-2.0 + h * i >= mu_half) EXPECT_GE(values[i], p0 - 1e-12);
  }
  EXPECT_LT(pressure_pmf(params(alpha, 0.0, 1.0)), p0);
}

TEST(Pmf, FreeEnergyShift) {
  for (double rho : {0.1, 1.0, 2.0, 5.0}) {
    const auto p = params(0.0, 0.3, 1.7);
    EXPECT_NEAR(free_energy_pmf(p, rho) - free_energy_ideal(p, rho), 0.5 * 1.7 * rho * rho, 1e-10);
  }
}

// ---- HYL -----------------------------------------------------------------

TEST(Hyl, VanishingCounterTermRecoversPmf) {
  for (double mu : {-0.05, 0.03, 0.2}) {
    ModelParams p = hyl_reference(mu);
    p.b = 1e-12;
    ModelParams q = p;
    q.b = 0.0;
    EXPECT_NEAR(pressure_hyl(p, kK), pressure_pmf(q), 1e-8) << mu;
  }
}

TEST(Hyl, DerivativeMatchesFiniteDifferencesAwayFromKink) {
  for (double mu : {0.03, 0.1}) {
    const double h = 1e-5;
    const double fd = (pressure_hyl(hyl_reference(mu + h), kK) -
                       pressure_hyl(hyl_reference(mu - h), kK)) /
                      (2.0 * h);
    const auto slope = density_hyl(hyl_reference(mu), kK);
    EXPECT_FALSE(slope.kink());
    EXPECT_LT(oracle::rel_err(fd, slope.mean()), 1e-5) << mu;
  }
}

TEST(Hyl, KinkAtCoexistence) {
  const double mu_star = reference_mu_star();
  const auto p = hyl_reference(mu_star);
  const auto slope = density_hyl(p, kK);
  EXPECT_TRUE(slope.kink());
  EXPECT_LT(slope.left, slope.right);
  EXPECT_THROW(condensate_hyl(p, kK), RegimeError);
  const auto w = make_weights(p, kK);
  const auto roots = hyl_solve_branch0(p, w);
  ASSERT_EQ(roots.size(), 3u);
  EXPECT_GT(roots.front().delta_star, mu_star / p.a);
  EXPECT_LT(roots.back().delta_star, mu_star / p.a);
}

TEST(Hyl, ConvexOnEachSideOfKink) {
  const double mu_star = reference_mu_star();
  for (double side : {-1.0, 1.0}) {
    std::vector<double> v;
    for (int i = 0; i < 5; ++i) v.push_back(pressure_hyl(hyl_reference(mu_star + side * (1e-4 + 2e-4 * i)), kK));
    for (std::size_t i = 1; i + 1 < v.size(); ++i) EXPECT_GE(v[i - 1] - 2 * v[i] + v[i + 1], -1e-12);
  }
}

TEST(Hyl, CondensateMatchesMinimizer) {
  for (double mu : {0.03, 0.07, 0.2}) {
    const auto p = hyl_reference(mu);
    const auto w = make_weights(p, kK);
    const auto best = hyl_minimizer(p, w);
    const double want = p.a / (p.a - p.b) * std::max(0.0, mu / p.a - best.delta_star);
    EXPECT_NEAR(condensate_hyl(p, kK), want, 1e-15) << mu;
    if (mu < 0.05) EXPECT_EQ(condensate_hyl(p, kK), 0.0);
    if (mu > 0.06) EXPECT_GT(condensate_hyl(p, kK), 0.0);
  }
}

// ---- density large deviations ---------------------------------------------

TEST(LogMgf, CaseSplit) {
  const auto p = params(-0.7);
  EXPECT_EQ(log_mgf(p, 0.0), 0.0);
  EXPECT_TRUE(std::isinf(log_mgf(p, 0.7 + 1e-9)));
  EXPECT_TRUE(std::isfinite(log_mgf(p, 0.7)));
  for (double t : {-2.0, -0.5, 0.3, 0.69}) {
    const auto direct = oracle::direct_bose_series(2.5, -p.beta * (p.alpha + t));
    const auto base = oracle::direct_bose_series(2.5, -p.beta * p.alpha);
    const double want = thermal_prefactor(3, p.beta) * (direct.value - base.value) / p.beta;
    EXPECT_NEAR(log_mgf(p, t), want, 1e-10 * std::max(1.0, std::abs(want))) << t;
  }
}

TEST(DensityRate, NonNegativeWithZeroAtLawOfLargeNumbers) {
  for (double alpha : {-1.0, -0.2}) {
    const auto p = params(alpha);
    const double rc = rho_critical(p);
    double best = std::numeric_limits<double>::infinity();
    double best_x = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double x = rc * i / 2000.0;
      const double j = density_rate_J(p, x);
      EXPECT_GE(j, -1e-12) << x;
      if (j < best) {
        best = j;
        best_x = x;
      }
    }
    EXPECT_NEAR(best_x, density_ideal(p), 2.0 * rc / 2000.0);
    EXPECT_NEAR(density_rate_J(p, density_ideal(p)), 0.0, 1e-10);
  }
}

TEST(DensityRate, InfiniteOutsideAdmissibleRange) {
  const auto p = params(-0.5);
  EXPECT_TRUE(std::isinf(density_rate_J(p, -1e-3)));
  EXPECT_TRUE(std::isinf(density_rate_J(p, rho_critical(p) * 1.001)));
  EXPECT_TRUE(std::isfinite(density_rate_J(p, rho_critical(p))));
  EXPECT_TRUE(std::isfinite(density_rate_J(params(-0.5, 0, 0, 1.0, 2), 100.0)));
}

TEST(DensityRate, PmfZeroAtPmfDensity) {
  for (double mu : {-0.5, 0.2, 0.6}) {
    const auto p = params(-0.5, mu, 1.0);
    const double delta = density_pmf(p);
    ASSERT_LT(mu, p.a * density_ideal(p));
    EXPECT_NEAR(density_rate_J_pmf(p, delta), 0.0, 1e-9) << mu;
    for (double x = 0.0; x < rho_critical(p); x += 0.05) {
      EXPECT_GE(density_rate_J_pmf(p, x), -1e-10);
    }
  }
}

// ---- condensates -----------------------------------------------------------

TEST(Condensate, IdealAndCmf) {
  EXPECT_EQ(condensate_ideal(params(-0.1)), 0.0);
  EXPECT_EQ(condensate_ideal(params(0.0)), 0.0);
  EXPECT_TRUE(std::isinf(condensate_ideal(params(0.0, 0, 0, 1.0, 2))));
  EXPECT_EQ(condensate_cmf(params(-0.1, 0, 1.0)), 0.0);
}

TEST(Condensate, PmfFormula) {
  EXPECT_NEAR(condensate_pmf(params(0.0, 5.0, 1.0)), 5.0 - kZeta32, 1e-12);
  const double alpha = -0.4;
  const double a = 2.0;
  const double mu_sat = a * density_ideal(params(alpha));
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mu = -1.0 + 10.0 * i / 199.0;
    const double c = condensate_pmf(params(alpha, mu, a));
    if (mu <= mu_sat) EXPECT_EQ(c, 0.0);
    if (mu > mu_sat) EXPECT_NEAR(c, mu / a - mu_sat / a, 1e-12);
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_NEAR(condensate_pmf(params(alpha, mu_sat + 1e-11, a)), 0.0, 1e-10);
}

TEST(Condensate, PmfLimitAtZeroAlpha) {
  const auto limit = [](double mu) { return std::max(0.0, mu - kZeta32); };
  for (double mu : {1.0, 3.0, 5.0}) {
    double prev_err = std::numeric_limits<double>::infinity();
    for (double alpha : {-1e-4, -1e-8, -1e-12, -1e-16}) {
      const double err = std::abs(condensate_pmf(params(alpha, mu, 1.0)) - limit(mu));
      EXPECT_LE(err, prev_err);
      prev_err = err;
    }
    EXPECT_LE(prev_err, 1e-6);
  }
}

// ---- scans -----------------------------------------------------------------

TEST(PhaseScan, EmptyGrid) {
  EXPECT_TRUE(phase_scan(Model::pmf, params(-0.1, 0, 1.0), Sweep{}).empty());
  EXPECT_TRUE(Sweep::range(SweepVariable::mu, 1.0, 0.0, 0.1).grid.empty());
  EXPECT_THROW(Sweep::range(SweepVariable::mu, 0.0, 1.0, 0.0), ParameterError);
  Sweep bad;
  bad.grid = {0.0, 0.0};
  EXPECT_THROW(phase_scan(Model::pmf, params(-0.1, 0, 1.0), bad), ParameterError);
}

TEST(PhaseScan, PmfPlateau) {
  const auto tmpl = params(-0.3, 0.0, 1.0);
  const double rho = density_ideal(tmpl);
  const auto rows = phase_scan(Model::pmf, tmpl, Sweep::range(SweepVariable::mu, -2.0, 8.0, 0.05));
  ASSERT_EQ(rows.size(), 201u);
  for (const auto& r : rows) {
    EXPECT_LE(r.density_at_zero, rho + 1e-15);
    EXPECT_GE(r.condensate, 0.0);
    if (r.sweep_value > rho + 1e-9) {
      EXPECT_EQ(r.density_at_zero, rho);
      EXPECT_NEAR(r.condensate, r.sweep_value - rho, 1e-12);
      EXPECT_EQ(r.regime_label, "saturated");
    }
  }
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (std::abs(rows[i].sweep_value - rho) < 0.1) continue;
    const double fd = (rows[i + 1].pressure - rows[i - 1].pressure) / 0.1;
    EXPECT_NEAR(fd, rows[i].dpressure, 0.01 * std::abs(rows[i].dpressure) + 1e-3);
  }
}

TEST(PhaseScan, KinkLabels) {
  const auto tmpl = params(-0.3, 0.0, 1.0);
  Sweep s;
  s.grid = {density_ideal(tmpl)};
  EXPECT_EQ(phase_scan(Model::pmf, tmpl, s).front().regime_label, "kink:saturation");
}

TEST(PhaseScan, AnalyticDerivativesAgreeWithFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, -0.05);
  for (Model m : {Model::ideal, Model::cmf, Model::pmf}) {
    for (int i = 0; i < 20; ++i) {
      const double alpha = u(rng);
      const auto tmpl = params(0.0, 0.5, 1.0);
      Sweep s;
      s.variable = SweepVariable::alpha;
      s.grid = {alpha - 1e-5, alpha, alpha + 1e-5};
      const auto rows = phase_scan(m, tmpl, s, {kK, 1});
      const double fd = (rows[2].pressure - rows[0].pressure) / 2e-5;
      EXPECT_LT(oracle::rel_err(fd, rows[1].dpressure), 1e-5) << to_string(m) << " " << alpha;
    }
  }
}

TEST(PhaseScan, HylCoexistenceCount) {
  const double mu_star = reference_mu_star();
  Sweep s;
  s.grid = {mu_star - 5e-6, mu_star, mu_star + 5e-6};
  const auto rows = phase_scan(Model::hyl, hyl_reference(0.0), s, {kK, 0});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].n_minimizers, 1);
  EXPECT_EQ(rows[1].n_minimizers, 2);
  EXPECT_EQ(rows[1].regime_label, "kink:coexistence");
  EXPECT_EQ(rows[2].n_minimizers, 1);
  EXPECT_EQ(rows[0].regime_label, "unique:xi0");
  EXPECT_EQ(rows[2].regime_label, "unique:xi2");
  for (const auto& r : rows) EXPECT_EQ(r.n_stationary, 3);
}

TEST(PhaseScan, RowErrorsDoNotAbort) {
  ModelParams tmpl = hyl_reference(0.0);
  tmpl.b = 2.0;  // b >= a
  const auto rows = phase_scan(Model::hyl, tmpl, Sweep::range(SweepVariable::mu, 0.0, 0.1, 0.05));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.regime_label.rfind("error: ", 0), 0u);
    EXPECT_TRUE(std::isnan(r.pressure));
  }
}

TEST(PhaseScan, OrderIndependentOfThreads) {
  const auto tmpl = params(-0.2, 0.0, 1.0);
  const auto sweep = Sweep::range(SweepVariable::mu, -1.0, 3.0, 0.01);
  const auto one = phase_scan(Model::pmf, tmpl, sweep, {kK, 1});
  const auto many = phase_scan(Model::pmf, tmpl, sweep, {kK, 8});
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].sweep_value, many[i].sweep_value);
    EXPECT_EQ(one[i].pressure, many[i].pressure);
    EXPECT_EQ(one[i].regime_label, many[i].regime_label);
  }
}

TEST(PhaseScan, WorkerCountHonoursEnvironment) {
  ::setenv("BOSE_LDP_THREADS", "2", 1);
  EXPECT_EQ(worker_count(8), 2u);
  EXPECT_EQ(worker_count(1), 1u);
  ::unsetenv("BOSE_LDP_THREADS");
  EXPECT_EQ(worker_count(5), 5u);
  EXPECT_GE(worker_count(0), 1u);
}
