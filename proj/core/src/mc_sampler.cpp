#include "bose_ldp/mc_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/thermo.hpp"
#include "parallel.hpp"

namespace bose_ldp {
namespace {

constexpr std::size_t kBatches = 32;
// The autocorrelation sum is quadratic in the series length, so long chains
// keep a strided copy of the density series.
constexpr std::size_t kMaxSeries = std::size_t{1} << 12;

std::uint64_t splitmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Initial positive sequence estimate of n / tau.
double ess_geyer(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  const auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double g0 = autocov(0);
  if (!(g0 > 0.0)) return static_cast<double>(n);
  double tau = -g0;
  for (std::size_t m = 0; 2 * m + 1 < n / 2; ++m) {
    const double pair = autocov(2 * m) + autocov(2 * m + 1);
    if (!(pair > 0.0)) break;
    tau += 2.0 * pair;
  }
  tau /= g0;
  return static_cast<double>(n) / std::max(tau, 1e-12);
}

std::size_t recorded_count(const SamplerConfig& cfg) {
  return (cfg.chain_length - cfg.burn_in + cfg.thinning - 1) / cfg.thinning;
}

class ChainAccumulator {
 public:
  ChainAccumulator(std::size_t K, std::size_t n_records, double volume)
      : K_(K), volume_(volume), sum_(K, 0.0), sumsq_(K, 0.0) {
    batches_ = std::min(kBatches, n_records);
    batch_size_ = batches_ ? n_records / batches_ : 0;
    batch_sum_.assign(batches_ * (K + 1), 0.0);
    stride_ = std::max<std::size_t>(1, (n_records + kMaxSeries - 1) / kMaxSeries);
  }

  void add(std::span<const std::int64_t> counts) {
    double D = 0.0;
    const std::size_t batch = batch_size_ ? n_ / batch_size_ : batches_;
    for (std::size_t i = 0; i < K_; ++i) {
      const double c = static_cast<double>(counts[i]);
      sum_[i] += c;
      sumsq_[i] += c * c;
      D += static_cast<double>(i + 1) * c;
      if (batch < batches_) batch_sum_[batch * (K_ + 1) + i] += c;
    }
    D /= volume_;
    if (batch < batches_) batch_sum_[batch * (K_ + 1) + K_] += D;
    d_sum_ += D;
    d_sumsq_ += D * D;
    if (n_ % stride_ == 0) series_.push_back(D);
    ++n_;
  }

  std::size_t K_;
  double volume_;
  std::vector<double> sum_, sumsq_, batch_sum_, series_;
  double d_sum_ = 0.0, d_sumsq_ = 0.0;
  std::size_t n_ = 0, batches_ = 0, batch_size_ = 0, stride_ = 1;
  std::size_t accepted_ = 0, proposed_ = 0;
};

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

SampleStats merge(const std::vector<ChainAccumulator>& chains, std::size_t K, double volume,
                  double tail_bias) {
  SampleStats st;
  st.mean.assign(K, 0.0);
  st.std_error.assign(K, 0.0);
  st.variance.assign(K, 0.0);
  st.tail_bias = tail_bias;
  std::size_t n = 0, accepted = 0, proposed = 0;
  std::vector<double> sum(K, 0.0), sumsq(K, 0.0);
  double d_sum = 0.0, d_sumsq = 0.0;
  for (const auto& c : chains) {
    n += c.n_;
    accepted += c.accepted_;
    proposed += c.proposed_;
    for (std::size_t i = 0; i < K; ++i) {
      sum[i] += c.sum_[i];
      sumsq[i] += c.sumsq_[i];
    }
    d_sum += c.d_sum_;
    d_sumsq += c.d_sumsq_;
    // a strided series has the same n / tau as the full one while stride < tau;
    // past that it saturates at the series length, a lower bound
    st.ess += ess_geyer(c.series_);
  }
  st.n_samples = n;
  st.ess = std::min(st.ess, static_cast<double>(n));
  st.acceptance_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 1.0;
  if (n == 0) return st;
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < K; ++i) {
    const double m = sum[i] / dn;
    st.mean[i] = m / volume;
    st.variance[i] = std::max(0.0, sumsq[i] / dn - m * m) * dn / std::max(dn - 1.0, 1.0);
    std::vector<double> bm;
    for (const auto& c : chains) {
      for (std::size_t b = 0; b < c.batches_; ++b) {
        bm.push_back(c.batch_sum_[b * (K + 1) + i] / (static_cast<double>(c.batch_size_) * volume));
      }
    }
    st.std_error[i] = bm.empty() ? 0.0 : sd_of(bm) / std::sqrt(static_cast<double>(bm.size()));
  }
  st.density_mean = d_sum / dn;
  st.density_sd =
      std::sqrt(std::max(0.0, d_sumsq / dn - st.density_mean * st.density_mean) * dn /
                std::max(dn - 1.0, 1.0));
  std::vector<double> bm;
  for (const auto& c : chains) {
    for (std::size_t b = 0; b < c.batches_; ++b) {
      bm.push_back(c.batch_sum_[b * (K + 1) + K] / static_cast<double>(c.batch_size_));
    }
  }
  st.density_std_error = bm.empty() ? 0.0 : sd_of(bm) / std::sqrt(static_cast<double>(bm.size()));
  return st;
}

double tail_density(const ModelParams& params, std::size_t K) {
  const auto w = make_weights(params, K);
  if (!std::isfinite(w.rho())) return w.rho();
  return std::max(0.0, w.rho() - w.rho_K());
}

// Runs every chain, sequentially through the sink when one is given.
template <class ChainFn>
std::vector<ChainAccumulator> run_chains(const SamplerConfig& cfg, const SampleSink& sink,
                                         ChainFn&& chain_fn) {
  std::vector<ChainAccumulator> chains;
  chains.reserve(cfg.n_chains);
  for (std::size_t c = 0; c < cfg.n_chains; ++c) {
    chains.emplace_back(cfg.K, recorded_count(cfg), cfg.volume);
  }
  if (sink) {
    for (std::size_t c = 0; c < cfg.n_chains; ++c) chain_fn(c, chains[c], &sink);
  } else {
    detail::parallel_for(cfg.n_chains, worker_count(cfg.threads),
                         [&](std::size_t c) { chain_fn(c, chains[c], nullptr); });
  }
  return chains;
}

// beta * volume * H(N / volume) in terms of the running sums.
struct TiltEnergy {
  Model model;
  ModelParams p;
  double volume;

  double operator()(double count, double density, double squares) const {
    const double V = volume;
    switch (model) {
      case Model::ideal: return 0.0;
      case Model::cmf: {
        const double n = count / V;
        return p.beta * V * 0.5 * p.a * n * n;
      }
      case Model::pmf: {
        const double D = density / V;
        return p.beta * V * (-p.mu * D + 0.5 * p.a * D * D);
      }
      case Model::hyl: {
        const double D = density / V;
        return p.beta * V * (-p.mu * D + 0.5 * p.a * D * D - 0.5 * p.b * squares / (V * V));
      }
    }
    return 0.0;
  }
};

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix(seed ^ splitmix(stream + 0x9e3779b97f4a7c15ULL))) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return splitmix(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

void SamplerConfig::validate() const {
  if (!(volume > 0.0) || !std::isfinite(volume)) throw ParameterError("volume must be > 0");
  if (K == 0) throw ParameterError("cycle cutoff K must be >= 1");
  if (chain_length == 0) throw ParameterError("chain length must be >= 1");
  if (burn_in >= chain_length) throw ParameterError("burn-in must be shorter than the chain");
  if (thinning == 0) throw ParameterError("thinning must be >= 1");
  if (n_chains == 0) throw ParameterError("need at least one chain");
  if (cap && *cap < 0) throw ParameterError("count cap must be >= 0");
}

SampleStats sample_reference(const ModelParams& params, const SamplerConfig& cfg,
                             const SampleSink& sink) {
  params.validate();
  cfg.validate();
  const auto w = make_weights(params, cfg.K);
  auto chain_fn = [&](std::size_t c, ChainAccumulator& acc, const SampleSink* out) {
    CounterRng rng(cfg.seed, c);
    std::vector<std::poisson_distribution<std::int64_t>> laws;
    for (double q : w.q()) laws.emplace_back(cfg.volume * q);
    std::vector<std::int64_t> counts(cfg.K);
    for (std::size_t s = 0; s < cfg.chain_length; ++s) {
      for (std::size_t i = 0; i < cfg.K; ++i) counts[i] = laws[i](rng);
      if (s < cfg.burn_in || (s - cfg.burn_in) % cfg.thinning != 0) continue;
      acc.add(counts);
      if (out) (*out)(c, s, counts);
    }
  };
  return merge(run_chains(cfg, sink, chain_fn), cfg.K, cfg.volume, tail_density(params, cfg.K));
}

SampleStats mcmc_tilted(Model model, const ModelParams& params, const SamplerConfig& cfg,
                        const SampleSink& sink) {
  params.validate();
  cfg.validate();
  const auto w = make_weights(params, cfg.K);
  std::vector<double> log_mass(cfg.K);
  for (std::size_t i = 0; i < cfg.K; ++i) log_mass[i] = std::log(cfg.volume * w.q(i + 1));
  const TiltEnergy energy{model, params, cfg.volume};

  auto chain_fn = [&](std::size_t c, ChainAccumulator& acc, const SampleSink* out) {
    CounterRng rng(cfg.seed, c);
    std::vector<std::int64_t> N(cfg.K);
    double count = 0.0, density = 0.0, squares = 0.0;
    for (std::size_t i = 0; i < cfg.K; ++i) {
      N[i] = static_cast<std::int64_t>(std::llround(cfg.volume * w.q(i + 1)));
      if (cfg.cap) N[i] = std::min(N[i], *cfg.cap);
      const double k = static_cast<double>(i + 1);
      count += static_cast<double>(N[i]);
      density += k * static_cast<double>(N[i]);
      squares += k * k * static_cast<double>(N[i]) * static_cast<double>(N[i]);
    }
    double current = energy(count, density, squares);
    for (std::size_t s = 0; s < cfg.chain_length; ++s) {
      const std::uint64_t r = rng();
      const std::size_t i = static_cast<std::size_t>((r >> 1) % cfg.K);
      const bool up = (r & 1u) != 0;
      const double u = rng.uniform();
      ++acc.proposed_;
      const std::int64_t n = N[i];
      const bool blocked = up ? (cfg.cap && n + 1 > *cfg.cap) : n == 0;
      if (!blocked) {
        const double k = static_cast<double>(i + 1);
        const double dn = up ? 1.0 : -1.0;
        const double next_n = static_cast<double>(n) + dn;
        const double next_count = count + dn;
        const double next_density = density + k * dn;
        const double next_squares =
            squares + k * k * (next_n * next_n - static_cast<double>(n) * static_cast<double>(n));
        const double proposed = energy(next_count, next_density, next_squares);
        const double log_ref = up ? log_mass[i] - std::log(next_n)
                                  : std::log(static_cast<double>(n)) - log_mass[i];
        if (std::log(u) < log_ref - (proposed - current)) {
          N[i] = n + (up ? 1 : -1);
          count = next_count;
          density = next_density;
          squares = next_squares;
          current = proposed;
          ++acc.accepted_;
        }
      }
      if (s < cfg.burn_in || (s - cfg.burn_in) % cfg.thinning != 0) continue;
      acc.add(N);
      if (out) (*out)(c, s, N);
    }
  };
  return merge(run_chains(cfg, sink, chain_fn), cfg.K, cfg.volume, tail_density(params, cfg.K));
}

CondensateEstimate estimate_condensate(Model model, const ModelParams& params,
                                       const SamplerConfig& cfg,
                                       std::span<const std::size_t> K_grid) {
  cfg.validate();
  for (std::size_t i = 0; i < K_grid.size(); ++i) {
    if (K_grid[i] == 0 || K_grid[i] > cfg.K || (i > 0 && K_grid[i] <= K_grid[i - 1])) {
      throw ParameterError("K_grid must be increasing and within 1..cfg.K");
    }
  }
  const std::size_t G = K_grid.size();
  const std::size_t n_rec = recorded_count(cfg);
  const std::size_t batches = std::min(kBatches, n_rec);
  const std::size_t batch_size = n_rec / batches;
  // per chain: batch sums of D - D_{K'} for every K' in the grid
  std::vector<std::vector<double>> sums(cfg.n_chains, std::vector<double>(batches * G, 0.0));
  std::vector<std::vector<double>> totals(cfg.n_chains, std::vector<double>(G, 0.0));
  std::vector<std::size_t> seen(cfg.n_chains, 0);
  std::vector<double> tail(G);
  const SampleSink sink = [&](std::size_t chain, std::size_t, std::span<const std::int64_t> N) {
    // one backward pass: tail[j] = sum_{k > K_grid[j]} k N_k / volume
    double acc = 0.0;
    std::size_t i = N.size();
    for (std::size_t j = G; j-- > 0;) {
      for (; i > K_grid[j]; --i) acc += static_cast<double>(i) * static_cast<double>(N[i - 1]);
      tail[j] = acc / cfg.volume;
    }
    const std::size_t b = seen[chain] / batch_size;
    for (std::size_t j = 0; j < G; ++j) {
      totals[chain][j] += tail[j];
      if (b < batches) sums[chain][b * G + j] += tail[j];
    }
    ++seen[chain];
  };
  const SampleStats st = model == Model::ideal ? sample_reference(params, cfg, sink)
                                               : mcmc_tilted(model, params, cfg, sink);
  CondensateEstimate out;
  out.volume = cfg.volume;
  out.tail_bias = st.tail_bias;
  double n_total = 0.0;
  for (std::size_t s : seen) n_total += static_cast<double>(s);
  for (std::size_t j = 0; j < G; ++j) {
    CondensatePoint pt;
    pt.cutoff = K_grid[j];
    double total = 0.0;
    std::vector<double> bm;
    for (std::size_t c = 0; c < cfg.n_chains; ++c) {
      total += totals[c][j];
      for (std::size_t b = 0; b < batches; ++b) {
        bm.push_back(sums[c][b * G + j] / static_cast<double>(batch_size));
      }
    }
    pt.estimate = total / n_total;
    pt.std_error = sd_of(bm) / std::sqrt(static_cast<double>(bm.size()));
    out.points.push_back(pt);
  }
  return out;
}

CsvSampleWriter::CsvSampleWriter(std::ostream& out, std::size_t K, CsvLayout layout)
    : out_(&out), K_(K), layout_(layout) {
  if (layout_ == CsvLayout::long_format) {
    *out_ << "step,k,count\n";
  } else {
    *out_ << "step";
    for (std::size_t k = 1; k <= K_; ++k) *out_ << ",N_" << k;
    *out_ << '\n';
  }
}

void CsvSampleWriter::write(std::span<const std::int64_t> counts) {
  if (layout_ == CsvLayout::long_format) {
    for (std::size_t i = 0; i < K_; ++i) *out_ << rows_ << ',' << i + 1 << ',' << counts[i] << '\n';
  } else {
    *out_ << rows_;
    for (std::size_t i = 0; i < K_; ++i) *out_ << ',' << counts[i];
    *out_ << '\n';
  }
  ++rows_;
}

SampleSink CsvSampleWriter::sink() {
  return [this](std::size_t, std::size_t, std::span<const std::int64_t> counts) { write(counts); };
}

}  // namespace bose_ldp
