#include "bose_ldp_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "bose_ldp/errors.hpp"
#include "bose_ldp/mc_sampler.hpp"
#include "bose_ldp/model.hpp"
#include "bose_ldp/solvers.hpp"
#include "bose_ldp/special_functions.hpp"
#include "bose_ldp/thermo.hpp"

namespace bose_ldp::cli {
namespace {

using json = nlohmann::ordered_json;

json num(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

struct RunConfig {
  std::vector<std::string> models;
  ModelParams params;
  std::size_t K = kDefaultTruncation;
  std::string sweep;
  std::string format = "auto";
  std::string output;
  std::string config;
  // sampler
  double volume = 100.0;
  std::size_t steps = 100000;
  std::size_t burn_in = 0;
  std::uint64_t seed = 1;
  std::size_t thin = 1;
  std::int64_t cap = -1;
  std::size_t chains = 1;
  std::string layout = "wide";
  std::string samples_out;
  // condensate / minimizer extras
  bool mc = false;
  std::vector<std::size_t> kgrid;
  std::vector<double> volumes;
  std::size_t show = 10;
  bool k_from_config = false;
};

Sweep parse_sweep(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 4) throw ParameterError("--sweep expects var:start:stop:step");
  SweepVariable var;
  if (parts[0] == "mu") {
    var = SweepVariable::mu;
  } else if (parts[0] == "alpha") {
    var = SweepVariable::alpha;
  } else {
    throw ParameterError("sweep variable must be mu or alpha");
  }
  try {
    return Sweep::range(var, std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]));
  } catch (const std::invalid_argument&) {
    throw ParameterError("--sweep bounds must be numbers");
  } catch (const std::out_of_range&) {
    throw ParameterError("--sweep bounds out of range");
  }
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
    } else {
      file_.open(path);
      if (!file_) throw ParameterError("cannot open output file '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string resolve_format(const RunConfig& cfg, const char* fallback) {
  const std::string f = cfg.format == "auto" ? fallback : cfg.format;
  if (f != "csv" && f != "json") throw ParameterError("--format must be csv or json");
  return f;
}

Model single_model(const RunConfig& cfg, Model fallback) {
  if (cfg.models.empty()) return fallback;
  if (cfg.models.size() > 1) throw ParameterError("this subcommand takes one --model");
  return parse_model(cfg.models.front());
}

void write_kv_csv(std::ostream& out, const json& j) {
  out << "quantity,value\n";
  for (const auto& [key, value] : j.items()) {
    std::string v;
    if (value.is_number()) {
      v = format_number(value.get<double>());
    } else if (value.is_string()) {
      v = value.get<std::string>();
    } else {
      v = value.dump();
    }
    out << csv_field(key) << ',' << csv_field(v) << '\n';
  }
}

void emit(const RunConfig& cfg, std::ostream& out, const json& j) {
  Output o(cfg.output, out);
  if (resolve_format(cfg, "json") == "json") {
    o.get() << j.dump(2) << '\n';
  } else if (j.is_array()) {
    // header is the union of row keys in first-seen order; missing cells stay empty
    std::vector<std::string> keys;
    for (const auto& row : j) {
      for (const auto& [key, value] : row.items()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
      }
    }
    for (std::size_t i = 0; i < keys.size(); ++i) o.get() << (i ? "," : "") << csv_field(keys[i]);
    o.get() << '\n';
    for (const auto& row : j) {
      for (std::size_t i = 0; i < keys.size(); ++i) {
        std::string v;
        if (row.contains(keys[i])) {
          const auto& value = row[keys[i]];
          v = value.is_number()   ? format_number(value.get<double>())
              : value.is_string() ? value.get<std::string>()
                                  : value.dump();
        }
        o.get() << (i ? "," : "") << csv_field(v);
      }
      o.get() << '\n';
    }
  } else {
    write_kv_csv(o.get(), j);
  }
}

// ---- pressure -------------------------------------------------------------

json pressure_entry(Model model, const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  json j;
  j["model"] = std::string(to_string(model));
  switch (model) {
    case Model::ideal: {
      j["pressure"] = num(pressure_ideal(p));
      j["dpressure_dalpha"] = num(density_ideal(p));
      j["residual"] = 0.0;
      break;
    }
    case Model::cmf: {
      const auto w = make_weights(p, 1);
      const double gamma = cmf_gamma(w, p.a);
      j["pressure"] = num(pressure_cmf(p));
      j["dpressure_dalpha"] = num(density_cmf(p));
      j["residual"] = num(std::abs(gamma - std::exp(-p.a * p.beta * gamma) * w.qbar()));
      break;
    }
    case Model::pmf: {
      const auto fp = pmf_delta_star(p, make_weights(p, 1));
      j["pressure"] = num(pressure_pmf(p));
      j["dpressure_dmu"] = num(density_pmf(p));
      j["delta_star"] = num(fp.delta_star);
      j["regime"] = std::string(to_string(fp.regime));
      j["residual"] = num(fp.residual);
      break;
    }
    case Model::hyl: {
      const auto w = make_weights(p, cfg.K);
      const auto sol = hyl_minimizer(p, w);
      const auto slope = density_hyl(p, cfg.K);
      j["pressure"] = num(w.qbar() / p.beta - sol.objective);
      j["dpressure_dmu_left"] = num(slope.left);
      j["dpressure_dmu_right"] = num(slope.right);
      j["delta_star"] = num(sol.delta_star);
      j["label"] = std::string(to_string(sol.label));
      j["residual"] = num(sol.residual);
      break;
    }
  }
  return j;
}

int cmd_pressure(const RunConfig& cfg, std::ostream& out) {
  std::vector<Model> models;
  if (cfg.models.empty()) {
    models = {Model::ideal, Model::cmf, Model::pmf, Model::hyl};
  } else {
    for (const auto& m : cfg.models) models.push_back(parse_model(m));
  }
  json rows = json::array();
  for (Model m : models) {
    if (cfg.models.empty()) {
      // implicit "all": skip models whose parameters are not set
      if ((m == Model::pmf && !(cfg.params.a > 0.0)) ||
          (m == Model::hyl && !(cfg.params.b > 0.0 && cfg.params.b < cfg.params.a))) {
        continue;
      }
    }
    rows.push_back(pressure_entry(m, cfg));
  }
  emit(cfg, out, rows);
  return kExitOk;
}

// ---- minimizer ------------------------------------------------------------

json head_of(const OccupationVector& x, std::size_t show) {
  json arr = json::array();
  for (std::size_t k = 1; k <= std::min(show, x.K()); ++k) arr.push_back(num(x(k)));
  return arr;
}

int cmd_minimizer(const RunConfig& cfg, std::ostream& out) {
  const Model model = single_model(cfg, Model::ideal);
  const ModelParams& p = cfg.params;
  const auto w = make_weights(p, cfg.K);
  json j;
  j["model"] = std::string(to_string(model));
  j["K"] = cfg.K;
  OccupationVector xi;
  double stationarity = 0.0;
  const auto log_ratio = [&](std::size_t k) { return std::log(xi(k) / w.q(k)); };
  switch (model) {
    case Model::ideal: {
      xi = ideal_minimizer(w);
      j["density"] = num(w.rho());
      break;
    }
    case Model::cmf: {
      xi = cmf_minimizer(w, p.a);
      const double gamma = cmf_gamma(w, p.a);
      for (std::size_t k = 1; k <= xi.K(); ++k) {
        stationarity = std::max(stationarity, std::abs(log_ratio(k) + p.a * p.beta * gamma));
      }
      j["gamma"] = num(gamma);
      j["density"] = num(gamma / w.qbar() * w.rho());
      j["fixed_point_residual"] = num(std::abs(gamma - std::exp(-p.a * p.beta * gamma) * w.qbar()));
      break;
    }
    case Model::pmf: {
      const auto fp = pmf_delta_star(p, w);
      xi = pmf_minimizer(p, w, fp);
      const double rate = std::min(p.mu - p.a * fp.delta_star, 0.0);
      for (std::size_t k = 1; k <= xi.K(); ++k) {
        stationarity = std::max(stationarity,
                                std::abs(log_ratio(k) - p.beta * static_cast<double>(k) * rate));
      }
      j["delta_star"] = num(fp.delta_star);
      j["regime"] = std::string(to_string(fp.regime));
      j["fixed_point_residual"] = num(fp.residual);
      j["density"] = num(fp.delta_star);
      break;
    }
    case Model::hyl: {
      const auto roots = hyl_solve_branch0(p, w);
      const auto sol = hyl_minimizer(p, w);
      xi = sol.xi;
      const double c = hyl_exponent_rate(sol.delta_star, p);
      for (std::size_t k = 1; k <= xi.K(); ++k) {
        const double kk = static_cast<double>(k);
        stationarity = std::max(stationarity, std::abs(log_ratio(k) - p.b * p.beta * kk * kk * xi(k) -
                                                       p.beta * kk * c));
      }
      j["delta_star"] = num(sol.delta_star);
      j["label"] = std::string(to_string(sol.label));
      j["objective"] = num(sol.objective);
      j["fixed_point_residual"] = num(sol.residual);
      j["density"] = num(sol.delta_star);
      json all = json::array();
      for (const auto& r : roots) {
        all.push_back({{"delta_star", num(r.delta_star)},
                       {"label", std::string(to_string(r.label))},
                       {"objective", num(r.objective)},
                       {"residual", num(r.residual)}});
      }
      j["stationary_points"] = all;
      break;
    }
  }
  j["stationarity_residual"] = num(stationarity);
  j["objective_value"] = num(objective(model, xi, w));
  j["xi_head"] = head_of(xi, cfg.show);
  emit(cfg, out, j);
  return kExitOk;
}

// ---- phase-scan -----------------------------------------------------------

int cmd_phase_scan(const RunConfig& cfg, std::ostream& out) {
  if (cfg.sweep.empty()) throw ParameterError("phase-scan requires --sweep var:start:stop:step");
  const Model model = single_model(cfg, Model::pmf);
  ScanOptions opts;
  opts.K = cfg.K;
  const auto rows = phase_scan(model, cfg.params, parse_sweep(cfg.sweep), opts);
  Output o(cfg.output, out);
  if (resolve_format(cfg, "csv") == "csv") {
    auto& s = o.get();
    s << "sweep_value,pressure,dpressure,density,condensate,n_minimizers,regime\n";
    for (const auto& r : rows) {
      s << format_number(r.sweep_value) << ',' << format_number(r.pressure) << ','
        << format_number(r.dpressure) << ',' << format_number(r.density_at_zero) << ','
        << format_number(r.condensate) << ',' << r.n_minimizers << ',' << csv_field(r.regime_label)
        << '\n';
    }
    return kExitOk;
  }
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"sweep_value", num(r.sweep_value)},
                   {"pressure", num(r.pressure)},
                   {"dpressure", num(r.dpressure)},
                   {"density_at_zero", num(r.density_at_zero)},
                   {"condensate", num(r.condensate)},
                   {"n_minimizers", r.n_minimizers},
                   {"n_stationary", r.n_stationary},
                   {"residual", num(r.residual)},
                   {"regime_label", r.regime_label}});
  }
  o.get() << arr.dump(2) << '\n';
  return kExitOk;
}

// ---- critical -------------------------------------------------------------

int cmd_critical(const RunConfig& cfg, std::ostream& out) {
  const Model model = single_model(cfg, Model::hyl);
  const ModelParams& p = cfg.params;
  json j;
  j["rho_c"] = num(rho_critical(p));
  j["rho_c_cmf"] = num(rho_critical_cmf(p));
  if (model == Model::hyl) {
    const auto cp = critical_params(p, make_weights(p, cfg.K));
    j["mu_p"] = num(cp.mu_p);
    j["mu_tang"] = num(cp.mu_tang);
    j["mu_star"] = cp.mu_star ? num(*cp.mu_star) : json(nullptr);
    j["mu_star_pressure_gap"] = num(cp.mu_star_gap);
    j["x_tang"] = num(cp.x_tang);
    j["beta_star"] = num(cp.beta_star);
    j["b_star"] = num(cp.b_star);
    j["dge5_condition_holds"] = cp.dge5_condition_holds;
    j["slope_at_peak"] = num(cp.slope_at_peak);
  } else if (model == Model::pmf) {
    j["mu_saturation"] = num(p.a * density_ideal(p));
  }
  emit(cfg, out, j);
  return kExitOk;
}

// ---- condensate -----------------------------------------------------------

SamplerConfig sampler_config(const RunConfig& cfg, bool k_given) {
  SamplerConfig s;
  s.volume = cfg.volume;
  s.K = k_given ? cfg.K : 20;
  s.chain_length = cfg.steps;
  s.burn_in = cfg.burn_in;
  s.seed = cfg.seed;
  s.thinning = cfg.thin;
  if (cfg.cap >= 0) s.cap = cfg.cap;
  s.n_chains = cfg.chains;
  s.validate();
  return s;
}

int cmd_condensate(const RunConfig& cfg, std::ostream& out, bool k_given) {
  const Model model = single_model(cfg, Model::pmf);
  const ModelParams& p = cfg.params;
  json j;
  j["model"] = std::string(to_string(model));
  double value = 0.0;
  switch (model) {
    case Model::ideal: value = condensate_ideal(p); break;
    case Model::cmf: value = condensate_cmf(p); break;
    case Model::pmf: value = condensate_pmf(p); break;
    case Model::hyl: value = condensate_hyl(p, cfg.K); break;
  }
  j["condensate"] = num(value);
  if (cfg.mc) {
    SamplerConfig s = sampler_config(cfg, k_given);
    std::vector<std::size_t> grid = cfg.kgrid;
    std::sort(grid.begin(), grid.end());
    // without -K the chain keeps cycles up to twice the largest cutoff, so
    // every K' in the grid has a tail to measure
    if (!k_given && !grid.empty()) s.K = 2 * grid.back();
    if (grid.empty()) grid = {s.K / 4 > 0 ? s.K / 4 : 1, s.K / 2 > 0 ? s.K / 2 : 1, s.K};
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> volumes = cfg.volumes.empty() ? std::vector<double>{s.volume} : cfg.volumes;
    json matrix = json::array();
    for (double v : volumes) {
      s.volume = v;
      const auto est = estimate_condensate(model, p, s, grid);
      for (const auto& pt : est.points) {
        matrix.push_back({{"volume", num(v)},
                          {"cutoff", pt.cutoff},
                          {"estimate", num(pt.estimate)},
                          {"std_error", num(pt.std_error)},
                          {"tail_bias", num(est.tail_bias)}});
      }
    }
    j["monte_carlo"] = matrix;
  }
  emit(cfg, out, j);
  return kExitOk;
}

// ---- sample ---------------------------------------------------------------

int cmd_sample(const RunConfig& cfg, std::ostream& out, bool k_given) {
  const Model model = single_model(cfg, Model::ideal);
  const SamplerConfig s = sampler_config(cfg, k_given);
  if (cfg.layout != "wide" && cfg.layout != "long") {
    throw ParameterError("--layout must be wide or long");
  }
  std::optional<std::ofstream> stream_file;
  std::optional<CsvSampleWriter> writer;
  if (!cfg.samples_out.empty()) {
    stream_file.emplace(cfg.samples_out);
    if (!*stream_file) throw ParameterError("cannot open '" + cfg.samples_out + "'");
    writer.emplace(*stream_file, s.K,
                   cfg.layout == "wide" ? CsvLayout::wide_format : CsvLayout::long_format);
  }
  const SampleSink sink = writer ? writer->sink() : SampleSink{};
  const SampleStats st = model == Model::ideal ? sample_reference(cfg.params, s, sink)
                                               : mcmc_tilted(model, cfg.params, s, sink);
  json j;
  j["model"] = std::string(to_string(model));
  j["volume"] = num(s.volume);
  j["K"] = s.K;
  j["n_samples"] = st.n_samples;
  j["acceptance_rate"] = num(st.acceptance_rate);
  j["density_mean"] = num(st.density_mean);
  j["density_std_error"] = num(st.density_std_error);
  j["density_sd"] = num(st.density_sd);
  j["ess"] = num(st.ess);
  j["tail_bias"] = num(st.tail_bias);
  json per_k = json::array();
  for (std::size_t i = 0; i < st.mean.size(); ++i) {
    per_k.push_back({{"k", i + 1}, {"mean", num(st.mean[i])}, {"std_error", num(st.std_error[i])}});
  }
  j["per_cycle"] = per_k;
  if (resolve_format(cfg, "json") == "csv") {
    Output o(cfg.output, out);
    o.get() << "k,mean,std_error\n";
    for (std::size_t i = 0; i < st.mean.size(); ++i) {
      o.get() << i + 1 << ',' << format_number(st.mean[i]) << ',' << format_number(st.std_error[i])
              << '\n';
    }
    return kExitOk;
  }
  emit(cfg, out, j);
  return kExitOk;
}

// ---- verify ---------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  int failures = 0;
  const auto check = [&](const std::string& name, bool ok, double measured) {
    out << (ok ? "PASS " : "FAIL ") << name << " (" << format_number(measured) << ")\n";
    failures += ok ? 0 : 1;
  };
  {
    const double err = std::abs(riemann_zeta(2.0) - std::numbers::pi * std::numbers::pi / 6.0);
    check("zeta(2) = pi^2/6", err < 1e-13, err);
  }
  {
    double direct = 0.0;
    for (int k = 1; k < 200; ++k) direct += std::pow(k, -2.5) * std::exp(-1.0 * k);
    const double err = std::abs(bose_g(2.5, 1.0) / direct - 1.0);
    check("bose_g(2.5, 1) vs direct series", err < 1e-12, err);
  }
  {
    double worst = 0.0;
    for (double x = -1.0; x <= 5.0; x += 0.25) {
      worst = std::max(worst, std::abs(lambert_w(Branch::principal, x * std::exp(x)) - x));
    }
    for (double x = -6.0; x <= -1.0; x += 0.25) {
      worst = std::max(worst, std::abs(lambert_w(Branch::lower, x * std::exp(x)) - x));
    }
    check("Lambert W roundtrip", worst < 1e-10, worst);
  }
  const ModelParams& p = cfg.params;
  if (p.a > 0.0) {
    const auto fp = pmf_delta_star(p, make_weights(p, 1));
    check("PMF fixed-point residual", fp.residual <= 1e-10, fp.residual);
    const auto w = make_weights(p, 1);
    const double gamma = cmf_gamma(w, p.a);
    const double r = std::abs(gamma - std::exp(-p.a * p.beta * gamma) * w.qbar());
    check("CMF stationarity residual", r <= 1e-10, r);
  }
  if (p.alpha < 0.0) {
    const double j = density_rate_J(p, density_ideal(p));
    check("J_alpha vanishes at rho(alpha)", std::abs(j) < 1e-9, j);
  }
  if (p.b > 0.0 && p.b < p.a) {
    const auto w = make_weights(p, cfg.K);
    double worst = 0.0;
    for (const auto& r : hyl_solve_branch0(p, w)) worst = std::max(worst, r.residual);
    check("HYL root residuals", worst <= 1e-9, worst);
  }
  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
      << '\n';
  return failures == 0 ? kExitOk : kExitVerifyFailed;
}

// ---- config file ----------------------------------------------------------

void apply_config(RunConfig& cfg, const CLI::App& app) {
  if (cfg.config.empty()) return;
  std::ifstream in(cfg.config);
  if (!in) throw ParameterError("cannot read config file '" + cfg.config + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config file must hold a JSON object");
  const auto set = [&](const char* key, const char* flag, auto& field) {
    if (!j.contains(key) || app.count(flag) > 0) return;
    try {
      j.at(key).get_to(field);
    } catch (const json::exception&) {
      throw ParameterError(std::string("config key '") + key + "' has the wrong type");
    }
  };
  if (j.contains("model") && app.count("--model") == 0) {
    if (j["model"].is_string()) {
      cfg.models = {j["model"].get<std::string>()};
    } else {
      set("model", "--model", cfg.models);
    }
  }
  set("d", "-d", cfg.params.d);
  set("beta", "--beta", cfg.params.beta);
  set("alpha", "--alpha", cfg.params.alpha);
  set("mu", "--mu", cfg.params.mu);
  set("a", "-a", cfg.params.a);
  set("b", "-b", cfg.params.b);
  set("K", "-K", cfg.K);
  cfg.k_from_config = j.contains("K");
  set("sweep", "--sweep", cfg.sweep);
  set("format", "--format", cfg.format);
  set("output", "--output", cfg.output);
  set("volume", "--volume", cfg.volume);
  set("steps", "--steps", cfg.steps);
  set("burn_in", "--burn-in", cfg.burn_in);
  set("seed", "--seed", cfg.seed);
  set("thin", "--thin", cfg.thin);
  set("cap", "--cap", cfg.cap);
  set("chains", "--chains", cfg.chains);
  set("layout", "--layout", cfg.layout);
  set("samples_out", "--samples-out", cfg.samples_out);
}

}  // namespace

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Thermodynamics of random partition models: pressures, rate-function zeros, "
               "critical points, condensates and Monte Carlo checks"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--model", cfg.models, "ideal, cmf, pmf or hyl (repeatable for pressure)");
  app.add_option("-d", cfg.params.d, "spatial dimension");
  app.add_option("--beta", cfg.params.beta, "inverse temperature (> 0)");
  app.add_option("--alpha", cfg.params.alpha, "reference chemical potential (<= 0)");
  app.add_option("--mu", cfg.params.mu, "tilt chemical potential");
  app.add_option("-a", cfg.params.a, "mean-field coupling (>= 0)");
  app.add_option("-b", cfg.params.b, "counter-term coupling (0 < b < a for hyl)");
  app.add_option("-K", cfg.K, "cycle truncation (solvers) or cutoff (sampler)");
  app.add_option("--sweep", cfg.sweep, "var:start:stop:step with var in {mu, alpha}");
  app.add_option("--format", cfg.format, "csv or json");
  app.add_option("--output", cfg.output, "output file (default stdout)");
  app.add_option("--config", cfg.config, "JSON file with the same keys; flags win");
  app.add_option("--volume", cfg.volume, "sampler volume");
  app.add_option("--steps", cfg.steps, "samples or MCMC steps per chain");
  app.add_option("--burn-in", cfg.burn_in, "discarded initial steps");
  app.add_option("--seed", cfg.seed, "64-bit seed");
  app.add_option("--thin", cfg.thin, "record every n-th state");
  app.add_option("--cap", cfg.cap, "reject counts above this value (MCMC)");
  app.add_option("--chains", cfg.chains, "independent chains");
  app.add_option("--layout", cfg.layout, "sample CSV layout: wide or long");
  app.add_option("--samples-out", cfg.samples_out, "write the sample stream as CSV");

  auto* pressure = app.add_subcommand("pressure", "pressure at one parameter point");
  auto* minimizer = app.add_subcommand("minimizer", "zero of the rate function");
  minimizer->add_option("--show", cfg.show, "number of leading entries to print");
  auto* scan = app.add_subcommand("phase-scan", "pressure, density and condensate along a sweep");
  auto* critical = app.add_subcommand("critical", "critical parameters");
  auto* condensate = app.add_subcommand("condensate", "condensate density");
  condensate->add_flag("--mc", cfg.mc, "add a Monte Carlo estimate matrix");
  condensate->add_option("--kgrid", cfg.kgrid, "cutoffs K' for the estimate (chain cutoff defaults to 2 max K')");
  condensate->add_option("--volumes", cfg.volumes, "volumes for the estimate");
  auto* sample = app.add_subcommand("sample", "reference or tilted Monte Carlo sampling");
  auto* verify = app.add_subcommand("verify", "run built-in oracle comparisons");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParameter;
  }

  try {
    apply_config(cfg, app);
    cfg.params.validate();
    const bool k_given = app.count("-K") > 0 || cfg.k_from_config;
    if (*pressure) return cmd_pressure(cfg, out);
    if (*minimizer) return cmd_minimizer(cfg, out);
    if (*scan) return cmd_phase_scan(cfg, out);
    if (*critical) return cmd_critical(cfg, out);
    if (*condensate) return cmd_condensate(cfg, out, k_given);
    if (*sample) return cmd_sample(cfg, out, k_given);
    if (*verify) return cmd_verify(cfg, out);
  } catch (const RegimeError& e) {
    err << "regime error: " << e.what() << '\n';
    return kExitRegime;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitParameter;
  } catch (const DomainError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitParameter;
  }
  return kExitParameter;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace bose_ldp::cli
