#include <algorithm>
#include <cmath>
#include <limits>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/mc_sampler.hpp"

namespace bose_ldp {

std::size_t ProbabilityTable::index(std::span<const std::int64_t> counts) const {
  if (counts.size() != K) throw ParameterError("count vector length must equal K");
  std::size_t idx = 0;
  for (std::size_t i = K; i-- > 0;) {
    if (counts[i] < 0 || counts[i] > cap) throw ParameterError("count outside 0..cap");
    idx = idx * static_cast<std::size_t>(cap + 1) + static_cast<std::size_t>(counts[i]);
  }
  return idx;
}

double ProbabilityTable::probability(std::span<const std::int64_t> counts) const {
  return prob[index(counts)];
}

ProbabilityTable brute_force_distribution(Model model, const ModelParams& params, double volume,
                                          std::size_t K, std::int64_t cap) {
  params.validate();
  if (!(volume > 0.0)) throw ParameterError("volume must be > 0");
  if (K == 0 || K > 3) throw ParameterError("brute force supports 1 <= K <= 3");
  if (cap < 0) throw ParameterError("cap must be >= 0");
  const double states = std::pow(static_cast<double>(cap + 1), static_cast<double>(K));
  if (states > 1e7) throw ParameterError("state space exceeds 10^7 entries");

  const auto w = make_truncated_weights(params, K);
  const auto side = static_cast<std::size_t>(cap + 1);
  const auto total = static_cast<std::size_t>(states);
  ProbabilityTable table;
  table.K = K;
  table.cap = cap;
  table.prob.resize(total);

  std::vector<double> mass(K);
  for (std::size_t i = 0; i < K; ++i) mass[i] = volume * w.q(i + 1);

  ModelParams p = params;
  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> x(K);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double log_w = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      const double n = static_cast<double>(rest % side);
      rest /= side;
      log_w += n * std::log(mass[i]) - std::lgamma(n + 1.0) - mass[i];
      x[i] = n / volume;
    }
    const OccupationVector occ(x);
    double H = 0.0;
    switch (model) {
      case Model::ideal: break;
      case Model::cmf: H = energy_cmf(occ, p); break;
      case Model::pmf: H = energy_pmf(occ, p); break;
      case Model::hyl: H = energy_hyl(occ, p); break;
    }
    log_w -= p.beta * volume * H;
    table.prob[idx] = log_w;
    max_log = std::max(max_log, log_w);
  }
  double sum = 0.0;
  for (double& v : table.prob) {
    v = std::exp(v - max_log);
    sum += v;
  }
  for (double& v : table.prob) v /= sum;
  table.log_partition = max_log + std::log(sum);
  return table;
}

OccupationVector grid_minimize_truncated(Model model, const ModelParams& params, std::size_t K,
                                         GridBounds bounds, double step) {
  if (K == 0 || K > 3) throw ParameterError("grid minimisation supports 1 <= K <= 3");
  if (!std::isfinite(bounds.lo) || !std::isfinite(bounds.hi) || !(bounds.hi > bounds.lo) ||
      bounds.lo < 0.0) {
    throw ParameterError("grid bounds must be finite with 0 <= lo < hi");
  }
  if (!(step > 0.0)) throw ParameterError("grid step must be > 0");
  const auto w = make_truncated_weights(params, K);

  std::vector<double> best(K, bounds.lo);
  double best_value = std::numeric_limits<double>::infinity();
  // Box [centre - radius, centre + radius] clipped to the bounds, spacing h.
  const auto search = [&](std::vector<double> centre, double radius, double h) {
    std::vector<double> lo(K), x(K);
    std::vector<std::size_t> n(K);
    std::size_t total = 1;
    for (std::size_t i = 0; i < K; ++i) {
      lo[i] = std::max(bounds.lo, centre[i] - radius);
      const double hi = std::min(bounds.hi, centre[i] + radius);
      n[i] = static_cast<std::size_t>(std::floor((hi - lo[i]) / h + 1e-9)) + 1;
      total *= n[i];
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rest = idx;
      for (std::size_t i = 0; i < K; ++i) {
        x[i] = lo[i] + h * static_cast<double>(rest % n[i]);
        rest /= n[i];
      }
      const double v = objective(model, OccupationVector(x), w);
      if (v < best_value) {
        best_value = v;
        best = x;
      }
    }
  };

  double h = std::max(step, (bounds.hi - bounds.lo) / 64.0);
  search(best, bounds.hi - bounds.lo, h);
  while (h > step) {
    const double finer = std::max(step, h / 16.0);
    search(best, h, finer);
    h = finer;
  }
  return OccupationVector(best);
}

}  // namespace bose_ldp
