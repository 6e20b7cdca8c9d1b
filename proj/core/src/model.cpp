#include "bose_ldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/special_functions.hpp"

namespace bose_ldp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

// r log r - r + 1, the per-entry relative entropy in units of q_k
double entropy_term(double r) {
  if (r == 0.0) return 1.0;
  // log1p(r - 1) loses r entirely once r - 1 rounds to -1
  const double log_r = r < 0.5 ? std::log(r) : std::log1p(r - 1.0);
  return r * log_r - (r - 1.0);
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw ParameterError(std::string(name) + " must be finite");
  }
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::ideal: return "ideal";
    case Model::cmf: return "cmf";
    case Model::pmf: return "pmf";
    case Model::hyl: return "hyl";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "ideal") return Model::ideal;
  if (name == "cmf") return Model::cmf;
  if (name == "pmf") return Model::pmf;
  if (name == "hyl") return Model::hyl;
  throw ParameterError("unknown model '" + std::string(name) +
                       "' (expected ideal, cmf, pmf or hyl)");
}

void ModelParams::validate() const {
  require_finite(beta, "beta");
  require_finite(alpha, "alpha");
  require_finite(mu, "mu");
  require_finite(a, "a");
  require_finite(b, "b");
  if (d < 1) throw ParameterError("dimension d must be a positive integer");
  if (!(beta > 0.0)) throw ParameterError("beta must be > 0");
  if (alpha > 0.0) {
    throw ParameterError("alpha must satisfy alpha <= 0 (cycle weights diverge otherwise)");
  }
  if (a < 0.0) throw ParameterError("coupling a must be >= 0");
  if (b < 0.0) throw ParameterError("coupling b must be >= 0");
}

void ModelParams::validate_hyl() const {
  validate();
  if (!(b > 0.0)) throw ParameterError("HYL requires b > 0");
  if (!(b < a)) throw ParameterError("HYL requires b < a");
}

double thermal_prefactor(int d, double beta) {
  return std::pow(4.0 * std::numbers::pi * beta, -0.5 * d);
}

CycleWeightTable::CycleWeightTable(const ModelParams& params, std::size_t K, Tail tail)
    : params_(params), tail_(tail), lambda_(thermal_prefactor(params.d, params.beta)) {
  params_.validate();
  if (K == 0) throw ParameterError("truncation K must be >= 1");
  const double order = 1.0 + 0.5 * params.d;
  q_.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double k = static_cast<double>(i + 1);
    q_[i] = lambda_ * std::exp(params.beta * params.alpha * k - order * std::log(k));
    qbar_K_ += q_[i];
    rho_K_ += k * q_[i];
  }
  if (truncated()) {
    qbar_ = qbar_K_;
    rho_ = rho_K_;
  } else {
    // closed forms can round below the partial sums once the tail underflows
    qbar_ = std::max(weight_sum(0.0), qbar_K_);
    rho_ = std::max(density_sum(0.0), rho_K_);
  }
}

double CycleWeightTable::weight_sum(double shift) const {
  const double s = params_.alpha + shift;
  if (s > 0.0) throw DomainError("weight_sum: alpha + shift must be <= 0");
  if (truncated()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q_.size(); ++i) {
      sum += q_[i] * std::exp(params_.beta * shift * static_cast<double>(i + 1));
    }
    return sum;
  }
  return lambda_ * bose_g(1.0 + 0.5 * params_.d, -params_.beta * s);
}

double CycleWeightTable::density_sum(double shift) const {
  const double s = params_.alpha + shift;
  if (s > 0.0) throw DomainError("density_sum: alpha + shift must be <= 0");
  if (truncated()) {
    double sum = 0.0;
    for (std::size_t i = 0; i < q_.size(); ++i) {
      const double k = static_cast<double>(i + 1);
      sum += k * q_[i] * std::exp(params_.beta * shift * k);
    }
    return sum;
  }
  if (s == 0.0 && params_.d <= 2) return kInf;
  return lambda_ * bose_g(0.5 * params_.d, -params_.beta * s);
}

CycleWeightTable make_weights(const ModelParams& params, std::size_t K) {
  return CycleWeightTable(params, K);
}

CycleWeightTable make_truncated_weights(const ModelParams& params, std::size_t K) {
  return CycleWeightTable(params, K, CycleWeightTable::Tail::truncated);
}

OccupationVector::OccupationVector(std::vector<double> x) : x_(std::move(x)) {
  for (double v : x_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ParameterError("occupation entries must be finite and >= 0");
    }
  }
}

double total_density(const OccupationVector& x) { return partial_density(x, x.K()); }

double partial_density(const OccupationVector& x, std::size_t K_prime) {
  const auto v = x.values();
  const std::size_t n = std::min(K_prime, v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += static_cast<double>(i + 1) * v[i];
  return sum;
}

double total_count(const OccupationVector& x) {
  double sum = 0.0;
  for (double v : x.values()) sum += v;
  return sum;
}

double ideal_rate(const OccupationVector& x, const CycleWeightTable& w) {
  if (x.K() > w.K()) {
    throw ParameterError("occupation vector longer than the weight table");
  }
  const auto v = x.values();
  const auto q = w.q();
  double sum = 0.0;
  double covered = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    sum += q[i] * entropy_term(v[i] / q[i]);
    covered += q[i];
  }
  return (sum + positive_part(w.qbar() - covered)) / w.params().beta;
}

double energy_cmf(const OccupationVector& x, const ModelParams& params) {
  const double n = total_count(x);
  return 0.5 * params.a * n * n;
}

double energy_pmf(const OccupationVector& x, const ModelParams& params) {
  const double D = total_density(x);
  return -params.mu * D + 0.5 * params.a * D * D;
}

double energy_pmf_lsc(const OccupationVector& x, const ModelParams& params) {
  const double excess = positive_part(params.mu - params.a * total_density(x));
  if (excess == 0.0) return energy_pmf(x, params);
  if (!(params.a > 0.0)) throw ParameterError("lsc regularisation requires a > 0");
  return energy_pmf(x, params) - excess * excess / (2.0 * params.a);
}

double energy_hyl(const OccupationVector& x, const ModelParams& params) {
  const auto v = x.values();
  double squares = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double kx = static_cast<double>(i + 1) * v[i];
    squares += kx * kx;
  }
  return energy_pmf(x, params) - 0.5 * params.b * squares;
}

double energy_hyl_pairwise(const OccupationVector& x, const ModelParams& params) {
  const auto v = x.values();
  const double D = total_density(x);
  double cross = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (j == k) continue;
      cross += static_cast<double>(j + 1) * static_cast<double>(k + 1) * v[j] * v[k];
    }
  }
  return -params.mu * D + 0.5 * (params.a - params.b) * D * D + 0.5 * params.b * cross;
}

double energy_hyl_lsc(const OccupationVector& x, const ModelParams& params) {
  const double excess = positive_part(params.mu - params.a * total_density(x));
  if (excess == 0.0) return energy_hyl(x, params);
  if (!(params.a > params.b)) throw ParameterError("HYL regularisation requires b < a");
  return energy_hyl(x, params) - excess * excess / (2.0 * (params.a - params.b));
}

double objective(Model model, const OccupationVector& x, const CycleWeightTable& w) {
  const double rate = ideal_rate(x, w);
  switch (model) {
    case Model::ideal: return rate;
    case Model::cmf: return rate + energy_cmf(x, w.params());
    case Model::pmf: return rate + energy_pmf_lsc(x, w.params());
    case Model::hyl: return rate + energy_hyl_lsc(x, w.params());
  }
  return rate;
}

double objective_F(const OccupationVector& x, const CycleWeightTable& w) {
  return objective(Model::hyl, x, w);
}

}  // namespace bose_ldp
