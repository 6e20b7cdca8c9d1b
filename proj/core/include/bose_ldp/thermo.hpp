#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bose_ldp/model.hpp"

namespace bose_ldp {

inline constexpr std::size_t kDefaultTruncation = 10000;

// Ideal gas. free_energy_* accept rho >= 0 and are constant for rho >= rho_c.
double pressure_ideal(const ModelParams& params);
double density_ideal(const ModelParams& params);  // rho(alpha) = dp/dalpha
double rho_critical(const ModelParams& params);   // +inf for d <= 2
// gamma <= 0 with rho(gamma) = rho; requires rho < rho_c.
double chemical_potential_ideal(const ModelParams& params, double rho);
double free_energy_ideal(const ModelParams& params, double rho);

double pressure_cmf(const ModelParams& params);
double density_cmf(const ModelParams& params);  // dp/dalpha
double rho_critical_cmf(const ModelParams& params);
double free_energy_cmf(const ModelParams& params, double rho);

double pressure_pmf(const ModelParams& params);
double density_pmf(const ModelParams& params);  // dp/dmu
double pressure_pmf_dalpha(const ModelParams& params);
double free_energy_pmf(const ModelParams& params, double rho);

// Derivative that may jump: left and right limits coincide away from kinks.
struct OneSided {
  double left = 0.0;
  double right = 0.0;
  bool kink() const { return left != right; }
  double mean() const { return 0.5 * (left + right); }
};

double pressure_hyl(const ModelParams& params, std::size_t K = kDefaultTruncation);
// dp/dmu; at coexistence the two one-sided limits.
OneSided density_hyl(const ModelParams& params, std::size_t K = kDefaultTruncation);

// Density large deviations. log_mgf returns +inf when alpha + t > 0.
double log_mgf(const ModelParams& params, double t);
double density_rate_J(const ModelParams& params, double x);
double density_rate_J_pmf(const ModelParams& params, double x);

double condensate_ideal(const ModelParams& params);
double condensate_cmf(const ModelParams& params);
double condensate_pmf(const ModelParams& params);
// Throws RegimeError at coexistence, where the pressure is not differentiable.
double condensate_hyl(const ModelParams& params, std::size_t K = kDefaultTruncation);

// ---- parameter sweeps ---------------------------------------------------

enum class SweepVariable { mu, alpha };

struct Sweep {
  SweepVariable variable = SweepVariable::mu;
  std::vector<double> grid;

  // start, start + step, ... up to stop inclusive (with a half-step guard).
  static Sweep range(SweepVariable variable, double start, double stop, double step);
};

struct PhaseScanRow {
  double sweep_value = 0.0;
  double pressure = 0.0;
  double dpressure = 0.0;  // derivative in the sweep variable
  double density_at_zero = 0.0;
  double condensate = 0.0;
  int n_minimizers = 0;
  int n_stationary = 0;
  double residual = 0.0;
  std::string regime_label;
};

struct ScanOptions {
  std::size_t K = kDefaultTruncation;
  unsigned threads = 0;  // 0: BOSE_LDP_THREADS or hardware concurrency
};

// Rows follow grid order; a failing row carries NaNs and an "error: ..." label.
std::vector<PhaseScanRow> phase_scan(Model model, const ModelParams& tmpl, const Sweep& sweep,
                                     const ScanOptions& options = {});

// Worker count after applying the BOSE_LDP_THREADS cap.
unsigned worker_count(unsigned requested);

}  // namespace bose_ldp
