#include "mclab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "mclab/matrix_io.hpp"

namespace mclab {

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream in(cleaned);
  double v;
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw ConfigError("config: key '" + key + "' is not a number list");
  return out;
}

ExperimentKind parse_kind(const std::string& text) {
  if (text == "recovery_sweep") return ExperimentKind::RecoverySweep;
  if (text == "bound_campaign") return ExperimentKind::BoundCampaign;
  if (text == "series_check") return ExperimentKind::SeriesCheck;
  if (text == "coeff_verify") return ExperimentKind::CoeffVerify;
  if (text == "semi_iso_check") return ExperimentKind::SemiIsoCheck;
  throw ConfigError("config: unknown experiment kind '" + text + "'");
}

NoiseLaw parse_law(const std::string& text) {
  if (text == "zero") return NoiseLaw::Zero;
  if (text == "uniform") return NoiseLaw::UniformBounded;
  if (text == "rademacher") return NoiseLaw::RademacherScaled;
  throw ConfigError("config: unknown noise law '" + text + "'");
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ splitmix64(b));
}

}  // namespace

void ExperimentConfig::validate() const {
  auto positive = [](long long v, const char* field) {
    if (v < 1) throw ConfigError(std::string("config: field '") + field + "' must be positive");
  };
  positive(m, "m");
  positive(n, "n");
  positive(r, "r");
  positive(r_max, "r_max");
  positive(trials, "trials");
  positive(factor_bound, "factor_bound");
  positive(threads, "threads");
  if (!(eps0 > 0)) throw ConfigError("config: field 'eps0' must be positive");
  if (!(gap_constant > 0)) throw ConfigError("config: field 'gap_constant' must be positive");
  if (r > std::min(m, n)) throw ConfigError("config: field 'r' exceeds min(m, n)");
  if (densities.empty()) throw ConfigError("config: field 'densities' is empty");
  for (size_t i = 0; i < densities.size(); ++i) {
    if (!(densities[i] > 0.0) || densities[i] > 1.0) {
      throw ConfigError("config: field 'densities' must lie in (0, 1]");
    }
    if (i > 0 && densities[i] <= densities[i - 1]) {
      throw ConfigError("config: field 'densities' must be strictly increasing");
    }
  }
  if (noise.law != NoiseLaw::Zero && !(noise.K_Z > 0)) {
    throw ConfigError("config: field 'noise.K_Z' must be positive for a nonzero law");
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  ConfigMap map = ConfigMap::parse_file(path);
  ExperimentConfig cfg;
  // Optional: the CLI subcommand overrides it anyway.
  cfg.kind = parse_kind(map.get_string("experiment.kind", "recovery_sweep"));
  cfg.m = static_cast<int>(map.get_int("experiment.m", cfg.m));
  cfg.n = static_cast<int>(map.get_int("experiment.n", cfg.n));
  cfg.r = static_cast<int>(map.get_int("experiment.r", cfg.r));
  cfg.r_max = static_cast<int>(map.get_int("experiment.r_max", cfg.r_max));
  cfg.eps0 = map.get_double("experiment.eps0", cfg.eps0);
  cfg.factor_bound = static_cast<int>(map.get_int("experiment.factor_bound", cfg.factor_bound));
  cfg.trials = static_cast<int>(map.get_int("experiment.trials", cfg.trials));
  cfg.gap_constant = map.get_double("experiment.gap_constant", cfg.gap_constant);
  cfg.seed = static_cast<std::uint64_t>(map.get_int("experiment.seed", 1));
  cfg.threads = static_cast<int>(map.get_int("experiment.threads", cfg.threads));
  cfg.out_dir = map.get_string("experiment.out_dir", cfg.out_dir);
  if (map.has("noise.law")) cfg.noise.law = parse_law(map.get_string("noise.law"));
  cfg.noise.K_Z = map.get_double("noise.K_Z", cfg.noise.K_Z);
  if (map.has("densities.values")) {
    cfg.densities = parse_list(map.get_string("densities.values"), "densities.values");
  }
  if (map.has("series.sigma")) {
    cfg.series_sigma = parse_list(map.get_string("series.sigma"), "series.sigma");
  }
  cfg.series_ratio = map.get_double("series.ratio", cfg.series_ratio);
  cfg.gamma_max = static_cast<int>(map.get_int("series.gamma_max", cfg.gamma_max));
  cfg.node_count = static_cast<int>(map.get_int("series.node_count", cfg.node_count));
  cfg.a_max = static_cast<int>(map.get_int("semi_iso.a_max", cfg.a_max));
  cfg.p_moment = static_cast<int>(map.get_int("semi_iso.p_moment", cfg.p_moment));
  cfg.M_param = map.get_double("semi_iso.M", cfg.M_param);
  cfg.enforce_semi_iso_hypothesis =
      map.get_int("semi_iso.enforce_hypothesis", cfg.enforce_semi_iso_hypothesis ? 1 : 0) != 0;
  cfg.samples = static_cast<int>(map.get_int("coeffs.samples", cfg.samples));
  cfg.coeff_gamma_max = static_cast<int>(map.get_int("coeffs.gamma_max", cfg.coeff_gamma_max));
  map.check_all_consumed();
  cfg.validate();
  return cfg;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(v.begin(), v.end());
  double pos = q * (static_cast<double>(v.size()) - 1.0);
  size_t lo = static_cast<size_t>(std::floor(pos));
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

TrialRecord run_single_trial(const ExperimentConfig& cfg, double p,
                             std::uint64_t trial_index) {
  auto start = std::chrono::steady_clock::now();

  TrialRecord rec;
  rec.m = cfg.m;
  rec.n = cfg.n;
  rec.r = cfg.r;
  rec.r_max = std::min({cfg.r_max, cfg.m, cfg.n});
  rec.eps0 = cfg.eps0;
  rec.p = p;
  rec.gap_constant = cfg.gap_constant;
  rec.trial_index = trial_index;
  rec.trial_seed = mix(cfg.seed, trial_index);

  GroundTruth gt = gen_ground_truth(cfg.m, cfg.n, cfg.r, cfg.factor_bound,
                                    cfg.eps0, mix(rec.trial_seed, 1));
  SampleMask mask = sample_mask(cfg.m, cfg.n, p, mix(rec.trial_seed, 2));
  Matrix Z = gen_noise(cfg.m, cfg.n, cfg.noise, mix(rec.trial_seed, 3));
  Observation obs = observe(gt, mask, Z);

  rec.p_hat = mask.p_hat;
  rec.rho = mask.rho;

  CoherenceReport coh = coherence(gt.factors, cfg.r);
  rec.mu0 = coh.mu0;
  rec.mu1 = coh.mu1;

  RecoveryConfig rcfg;
  rcfg.eps0 = cfg.eps0;
  rcfg.r_max = rec.r_max;
  rcfg.K_A = gt.K_A;
  rcfg.K_Z = cfg.noise.law == NoiseLaw::Zero ? 0.0 : cfg.noise.K_Z;
  rcfg.gap_constant = cfg.gap_constant;
  RecoveryResult rr = ar2_recover(obs.observed, mask.omega_size, rcfg);
  rec.s = rr.s;
  RecoveryVerdict verdict = exact_recovery_verdict(rr.A_out, gt);
  rec.exact = verdict.exact;
  rec.entry_errors = verdict.entry_errors;
  rec.max_abs_dev = verdict.max_abs_dev;
  rec.pre_round_inf = norm(rr.A_hat_s - gt.A, NormKind::Infinity);

  SvdFactors ft = truncated_svd(obs.rescaled_true, cfg.r);
  Matrix approx_diff = ft.reconstruct() - gt.A;  // A_r = A at the true rank
  rec.approx_inf = norm(approx_diff, NormKind::Infinity);
  rec.approx_op = operator_norm_power(approx_diff);

  const double K = gt.K_A + rcfg.K_Z;
  const double N = static_cast<double>(cfg.m + cfg.n);
  rec.E_op = operator_norm_power(obs.E);
  rec.E_bound = 2.0 * K * std::sqrt(N / p);
  rec.gap_ok = gt.delta[cfg.r - 1] >= 40.0 * cfg.r * K * std::sqrt(N / p);
  rec.density_ok = p >= (1.0 / cfg.m + 1.0 / cfg.n) * std::log(N);
  rec.signal_ok = gt.factors.sigma(0) >=
                  100.0 * cfg.r * K * std::sqrt(rec.r_max * N / p);

  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

nlohmann::json summarize(const std::vector<TrialRecord>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize: no rows");
  const int schema = rows.front().schema_version;
  for (const TrialRecord& r : rows) {
    if (r.schema_version != schema) {
      throw std::invalid_argument("summarize: heterogeneous row schemas");
    }
  }

  std::vector<double> densities;
  for (const TrialRecord& r : rows) {
    if (std::find(densities.begin(), densities.end(), r.p) == densities.end()) {
      densities.push_back(r.p);
    }
  }
  std::sort(densities.begin(), densities.end());

  nlohmann::json cells = nlohmann::json::array();
  for (double p : densities) {
    std::vector<const TrialRecord*> cell;
    for (const TrialRecord& r : rows) {
      if (r.p == p) cell.push_back(&r);
    }
    std::int64_t successes = 0, gap_ok = 0, density_ok = 0, signal_ok = 0;
    std::int64_t e_bound_ok = 0, rho_ok = 0;
    std::vector<double> pre_round, ratios;
    for (const TrialRecord* r : cell) {
      successes += r->exact;
      gap_ok += r->gap_ok;
      density_ok += r->density_ok;
      signal_ok += r->signal_ok;
      e_bound_ok += r->E_op <= r->E_bound;
      double rho_tol = std::log(static_cast<double>(r->m + r->n)) /
                       std::sqrt(r->p * r->m * r->n);
      rho_ok += std::abs(r->rho - 1.0) <= rho_tol;
      pre_round.push_back(r->pre_round_inf);
      if (r->approx_op > 0) ratios.push_back(r->approx_inf / r->approx_op);
    }
    const double count = static_cast<double>(cell.size());
    nlohmann::json c;
    c["p"] = p;
    c["trials"] = cell.size();
    c["success_rate"] = successes / count;
    c["median_pre_round_inf"] = quantile(pre_round, 0.5);
    c["p95_pre_round_inf"] = quantile(pre_round, 0.95);
    c["median_inf_over_op"] = ratios.empty() ? 0.0 : quantile(ratios, 0.5);
    c["gap_hypothesis_rate"] = gap_ok / count;
    c["density_hypothesis_rate"] = density_ok / count;
    c["signal_hypothesis_rate"] = signal_ok / count;
    c["E_bound_rate"] = e_bound_ok / count;
    c["rho_close_rate"] = rho_ok / count;
    cells.push_back(c);
  }

  nlohmann::json out;
  out["schema_version"] = schema;
  out["total_rows"] = rows.size();
  out["cells"] = cells;
  return out;
}

void write_csv(const std::string& path, const std::vector<TrialRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("write_csv: cannot open " + path);
  out << "schema_version,m,n,r,r_max,eps0,p,gap_constant,trial_index,trial_seed,"
         "p_hat,rho,mu0,mu1,s,exact,entry_errors,max_abs_dev,pre_round_inf,"
         "approx_inf,approx_op,E_op,E_bound,gap_ok,density_ok,signal_ok,wall_ms\n";
  std::vector<const TrialRecord*> sorted;
  for (const TrialRecord& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const TrialRecord* a, const TrialRecord* b) {
    return std::tie(a->p, a->trial_index) < std::tie(b->p, b->trial_index);
  });
  out << std::setprecision(17);
  for (const TrialRecord* r : sorted) {
    out << r->schema_version << ',' << r->m << ',' << r->n << ',' << r->r << ','
        << r->r_max << ',' << r->eps0 << ',' << r->p << ',' << r->gap_constant
        << ',' << r->trial_index << ',' << r->trial_seed << ',' << r->p_hat
        << ',' << r->rho << ',' << r->mu0 << ',' << r->mu1 << ',' << r->s << ','
        << r->exact << ',' << r->entry_errors << ',' << r->max_abs_dev << ','
        << r->pre_round_inf << ',' << r->approx_inf << ',' << r->approx_op
        << ',' << r->E_op << ',' << r->E_bound << ',' << r->gap_ok << ','
        << r->density_ok << ',' << r->signal_ok << ',' << r->wall_ms << '\n';
  }
  if (!out) throw IoError("write_csv: write failed for " + path);
}

namespace {

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
  const std::int64_t total =
      static_cast<std::int64_t>(cfg.densities.size()) * cfg.trials;
  std::vector<TrialRecord> rows(total);

  auto work = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      double p = cfg.densities[i / cfg.trials];
      rows[i] = run_single_trial(cfg, p, static_cast<std::uint64_t>(i));
    }
  };
  int threads = static_cast<int>(
      std::max<std::int64_t>(1, std::min<std::int64_t>(cfg.threads, total)));
  if (threads == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    std::int64_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::int64_t lo = t * chunk;
      std::int64_t hi = std::min(total, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (std::thread& th : pool) th.join();
  }

  ExperimentResult result;
  result.rows = std::move(rows);
  result.summary = summarize(result.rows);
  return result;
}

ExperimentResult run_series(const ExperimentConfig& cfg) {
  Vector sigma(static_cast<int>(cfg.series_sigma.size()));
  for (int i = 0; i < sigma.size(); ++i) sigma(i) = cfg.series_sigma[i];
  GroundTruth gt = gen_spectral_truth(cfg.m, cfg.n, sigma, mix(cfg.seed, 21));
  const int r = gt.r;

  RngStream rng(mix(cfg.seed, 22));
  Matrix E(cfg.m, cfg.n);
  for (int i = 0; i < cfg.m; ++i) {
    for (int j = 0; j < cfg.n; ++j) E(i, j) = rng.gaussian();
  }
  std::vector<int> S(r);
  for (int i = 0; i < r; ++i) S[i] = i;
  PerturbationReport pre = perturbation_report(gt, E, S);
  // R1 and R2 scale linearly with E, so one rescale lands on the target.
  E *= cfg.series_ratio / std::max(pre.R1, pre.R2);

  SvdFactors ft = svd(gt.A + E);
  Vector sigma_t = ft.sigma.head(std::min<int>(ft.sigma.size(), 2 * r));
  ContourSpec contour = build_contour(gt.factors.sigma.head(r), sigma_t, S, r,
                                      gt.Delta_S(S), cfg.node_count);

  ExperimentResult result;
  for (int nu : {0, 1}) {
    SeriesCheck check =
        resolvent_series_check(gt, E, S, nu, cfg.gamma_max, contour);
    nlohmann::json j;
    j["nu"] = nu;
    j["gamma_max"] = check.gamma_max;
    j["hypothesis_ok"] = check.hypothesis_ok;
    j["exact_norm"] = check.exact_norm;
    j["term_norms"] = check.term_norms;
    j["partial_sum_errors"] = check.partial_sum_errors;
    j["decay_ratios"] = check.decay_ratios;
    j["final_relative_residual"] =
        check.partial_sum_errors.back() / std::max(check.exact_norm, 1e-300);
    result.summary["series"].push_back(j);
  }
  return result;
}

ExperimentResult run_coeffs(const ExperimentConfig& cfg) {
  CoefficientBoundTable table =
      verify_coefficient_bounds(cfg.samples, cfg.coeff_gamma_max, cfg.r, cfg.seed);
  ExperimentResult result;
  result.summary["samples"] = table.samples.size();
  result.summary["violations"] = table.violations;
  result.summary["max_quadrature_gap"] = table.max_quadrature_gap;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/coeffs.csv");
    if (!out) throw IoError("run_experiment: cannot open coeffs.csv in " + cfg.out_dir);
    out << "sample,nu,gamma,beta,value,bound,pass\n" << std::setprecision(17);
    for (size_t i = 0; i < table.samples.size(); ++i) {
      const CoefficientBoundSample& s = table.samples[i];
      out << i << ',' << s.nu << ',' << s.gamma << ',' << s.I.size() << ','
          << s.value << ',' << s.bound << ',' << s.pass << '\n';
    }
  }
  return result;
}

ExperimentResult run_semi_iso(const ExperimentConfig& cfg) {
  SemiIsoResult res = semi_isotropic_check(
      cfg.m, cfg.n, cfg.M_param, cfg.a_max, cfg.p_moment, cfg.trials, cfg.seed,
      cfg.enforce_semi_iso_hypothesis);
  ExperimentResult result;
  result.summary["trials"] = res.trials;
  result.summary["a_max"] = res.a_max;
  result.summary["p_moment"] = res.p_moment;
  result.summary["M"] = res.M_param;
  result.summary["odd_tail"] = res.odd_tail;
  result.summary["even_tail"] = res.even_tail;
  result.summary["odd_failures"] = res.odd_failures;
  result.summary["even_failures"] = res.even_failures;
  result.summary["odd_hypothesis"] = res.odd_hypothesis;
  result.summary["even_hypothesis"] = res.even_hypothesis;
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  switch (cfg.kind) {
    case ExperimentKind::RecoverySweep:
    case ExperimentKind::BoundCampaign:
      result = run_sweep(cfg);
      break;
    case ExperimentKind::SeriesCheck:
      result = run_series(cfg);
      break;
    case ExperimentKind::CoeffVerify:
      result = run_coeffs(cfg);
      break;
    case ExperimentKind::SemiIsoCheck:
      result = run_semi_iso(cfg);
      break;
  }
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    if (!result.rows.empty()) write_csv(cfg.out_dir + "/rows.csv", result.rows);
    std::ofstream out(cfg.out_dir + "/summary.json");
    if (!out) throw IoError("run_experiment: cannot open summary.json in " + cfg.out_dir);
    out << result.summary.dump(2) << "\n";
  }
  return result;
}

}  // namespace mclab
