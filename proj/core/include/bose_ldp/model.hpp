#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bose_ldp {

enum class Model { ideal, cmf, pmf, hyl };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);  // throws ParameterError

struct ModelParams {
  int d = 3;
  double beta = 1.0;
  double alpha = 0.0;
  double mu = 0.0;
  double a = 0.0;
  double b = 0.0;

  // d >= 1, beta > 0, alpha <= 0, a >= 0, b >= 0, all finite.
  void validate() const;
  // validate() plus 0 < b < a.
  void validate_hyl() const;
};

// (4 pi beta)^{-d/2}
double thermal_prefactor(int d, double beta);

// Cycle weights q_k = e^{beta k alpha} (4 pi beta)^{-d/2} k^{-1-d/2}, k = 1..K.
//
// In closed-form mode qbar and rho are the full infinite sums. In truncated mode
// the model is the finite one on cycles 1..K and every sum stops at K; this is
// what the K <= 3 brute-force and grid oracles compare against.
class CycleWeightTable {
 public:
  enum class Tail { closed_form, truncated };

  CycleWeightTable(const ModelParams& params, std::size_t K,
                   Tail tail = Tail::closed_form);

  const ModelParams& params() const { return params_; }
  std::size_t K() const { return q_.size(); }
  bool truncated() const { return tail_ == Tail::truncated; }
  double lambda() const { return lambda_; }

  std::span<const double> q() const { return q_; }
  double q(std::size_t k) const { return q_[k - 1]; }  // 1-based

  double qbar() const { return qbar_; }
  double rho() const { return rho_; }  // +inf when alpha = 0 and d <= 2
  double rho_K() const { return rho_K_; }
  double qbar_K() const { return qbar_K_; }

  // sum_k q_k e^{beta k s} and sum_k k q_k e^{beta k s} for alpha + s <= 0.
  // The density sum returns +inf where the series diverges.
  double weight_sum(double shift) const;
  double density_sum(double shift) const;

 private:
  ModelParams params_;
  Tail tail_;
  double lambda_;
  std::vector<double> q_;
  double qbar_ = 0.0;
  double rho_ = 0.0;
  double rho_K_ = 0.0;
  double qbar_K_ = 0.0;
};

CycleWeightTable make_weights(const ModelParams& params, std::size_t K);
CycleWeightTable make_truncated_weights(const ModelParams& params, std::size_t K);

// Nonnegative finite sequence x_1..x_K, zero beyond K.
class OccupationVector {
 public:
  OccupationVector() = default;
  explicit OccupationVector(std::vector<double> x);

  std::size_t K() const { return x_.size(); }
  double operator()(std::size_t k) const { return x_[k - 1]; }  // 1-based
  std::span<const double> values() const { return x_; }

 private:
  std::vector<double> x_;
};

double total_density(const OccupationVector& x);
double partial_density(const OccupationVector& x, std::size_t K_prime);
double total_count(const OccupationVector& x);

// I_alpha(x) with the closed-form tail for k > x.K().
double ideal_rate(const OccupationVector& x, const CycleWeightTable& w);

double energy_cmf(const OccupationVector& x, const ModelParams& params);
double energy_pmf(const OccupationVector& x, const ModelParams& params);
double energy_pmf_lsc(const OccupationVector& x, const ModelParams& params);
double energy_hyl(const OccupationVector& x, const ModelParams& params);
// Same Hamiltonian as -mu D + ((a-b)/2) D^2 + (b/2) sum_{j != k} j k x_j x_k.
// O(K^2); used as a cross-check of energy_hyl.
double energy_hyl_pairwise(const OccupationVector& x, const ModelParams& params);
double energy_hyl_lsc(const OccupationVector& x, const ModelParams& params);

// ideal_rate + lsc energy of the given model (the ideal model adds nothing).
double objective(Model model, const OccupationVector& x, const CycleWeightTable& w);
double objective_F(const OccupationVector& x, const CycleWeightTable& w);  // HYL

}  // namespace bose_ldp
