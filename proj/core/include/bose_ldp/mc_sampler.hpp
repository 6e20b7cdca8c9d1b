#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bose_ldp/model.hpp"

namespace bose_ldp {

// Counter-based generator: output n of stream (seed, stream) is a fixed hash of
// (seed, stream, n), so chains are reproducible regardless of scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();
  double uniform();  // [0, 1) with 53 random bits

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct SamplerConfig {
  double volume = 1.0;
  std::size_t K = 20;
  std::size_t chain_length = 100000;  // samples (reference) or MCMC steps per chain
  std::size_t burn_in = 0;
  std::uint64_t seed = 1;
  std::size_t thinning = 1;
  std::optional<std::int64_t> cap;  // MCMC only: counts above cap are rejected
  std::size_t n_chains = 1;
  unsigned threads = 0;  // 0: BOSE_LDP_THREADS or hardware concurrency

  void validate() const;
};

struct SampleStats {
  std::vector<double> mean;       // E[N_k / volume]
  std::vector<double> std_error;  // batch-means standard error of mean
  std::vector<double> variance;   // sample variance of N_k
  double acceptance_rate = 1.0;
  double density_mean = 0.0;  // E[D(N/volume)] over k <= K
  double density_sd = 0.0;
  double density_std_error = 0.0;
  double ess = 0.0;        // for the density, summed over chains
  double tail_bias = 0.0;  // sum_{k>K} k q_k, the density the cutoff removes
  std::size_t n_samples = 0;
};

// Called for every recorded state; chains are visited in index order when a
// sink is given.
using SampleSink =
    std::function<void(std::size_t chain, std::size_t step, std::span<const std::int64_t> counts)>;

SampleStats sample_reference(const ModelParams& params, const SamplerConfig& cfg,
                             const SampleSink& sink = {});

// Metropolis chain for the measure tilted by exp(-beta volume H(N/volume)).
SampleStats mcmc_tilted(Model model, const ModelParams& params, const SamplerConfig& cfg,
                        const SampleSink& sink = {});

struct CondensatePoint {
  std::size_t cutoff = 0;
  double estimate = 0.0;  // E[D - D_{K'}]
  double std_error = 0.0;
};

struct CondensateEstimate {
  double volume = 0.0;
  std::vector<CondensatePoint> points;
  double tail_bias = 0.0;
};

CondensateEstimate estimate_condensate(Model model, const ModelParams& params,
                                       const SamplerConfig& cfg,
                                       std::span<const std::size_t> K_grid);

// Exact law of (N_1..N_K) on {0..cap}^K under Poisson(volume q_k) times the tilt.
struct ProbabilityTable {
  std::size_t K = 0;
  std::int64_t cap = 0;
  std::vector<double> prob;  // row-major, N_1 fastest
  double log_partition = 0.0;  // log of the tilted sum relative to the Poisson mass

  std::size_t index(std::span<const std::int64_t> counts) const;
  double probability(std::span<const std::int64_t> counts) const;
};

ProbabilityTable brute_force_distribution(Model model, const ModelParams& params, double volume,
                                          std::size_t K, std::int64_t cap);

struct GridBounds {
  double lo = 0.0;
  double hi = 1.0;
};

// Exhaustive grid argmin of the model objective over the truncated K-cycle
// model on [lo, hi]^K. A coarse grid (at most 65 nodes per axis) is refined
// around its argmin, 16x per pass, until the spacing reaches `step`.
OccupationVector grid_minimize_truncated(Model model, const ModelParams& params, std::size_t K,
                                         GridBounds bounds, double step);

enum class CsvLayout { long_format, wide_format };

// Sink writing `step,k,count` or `step,N_1..N_K` rows, header first. `step`
// counts recorded states across all chains, in sink order.
class CsvSampleWriter {
 public:
  CsvSampleWriter(std::ostream& out, std::size_t K, CsvLayout layout);
  void write(std::span<const std::int64_t> counts);
  SampleSink sink();

 private:
  std::ostream* out_;
  std::size_t K_;
  CsvLayout layout_;
  std::size_t rows_ = 0;
};

}  // namespace bose_ldp
