#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mclab/coherence.hpp"
#include "mclab/config.hpp"
#include "mclab/perturbation.hpp"
#include "mclab/recovery.hpp"

namespace mclab {

enum class ExperimentKind {
  RecoverySweep,
  BoundCampaign,
  SeriesCheck,
  CoeffVerify,
  SemiIsoCheck,
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::RecoverySweep;
  int m = 100, n = 100;
  int r = 3;
  int r_max = 10;
  double eps0 = 1.0;
  int factor_bound = 2;
  NoiseSpec noise;
  std::vector<double> densities{0.3};
  int trials = 50;
  double gap_constant = 20.0;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out_dir;

  // series_check
  std::vector<double> series_sigma{10.0, 8.0, 6.0, 4.0};
  double series_ratio = 0.1;  // target R1 v R2 of the scaled perturbation
  int gamma_max = 40;
  int node_count = 256;

  // semi_iso_check
  int a_max = 3;
  int p_moment = 2;
  double M_param = 1.0;
  bool enforce_semi_iso_hypothesis = true;

  // coeff_verify
  int samples = 500;
  int coeff_gamma_max = 6;

  void validate() const;  // ConfigError naming the offending field
  static ExperimentConfig from_file(const std::string& path);
};

/// One row per (density, trial); flat schema, every field always present.
struct TrialRecord {
  int schema_version = 1;
  int m = 0, n = 0, r = 0, r_max = 0;
  double eps0 = 1.0, p = 0.0, gap_constant = 20.0;
  std::uint64_t trial_index = 0;
  std::uint64_t trial_seed = 0;
  double p_hat = 0.0, rho = 0.0;
  double mu0 = 0.0, mu1 = 0.0;
  int s = 0;
  bool exact = false;
  std::int64_t entry_errors = 0;
  double max_abs_dev = 0.0;
  double pre_round_inf = 0.0;  // ||A_hat_s - A||_inf before rounding
  double approx_inf = 0.0;     // ||A~_r - A_r||_inf, A~ = p^{-1} observed
  double approx_op = 0.0;
  double E_op = 0.0;
  double E_bound = 0.0;  // 2 K sqrt((m+n)/p)
  bool gap_ok = false;     // delta_r >= 40 r K sqrt((m+n)/p)
  bool density_ok = false; // p >= (1/m + 1/n) log(m+n)
  bool signal_ok = false;  // sigma_1 >= 100 r K sqrt(r_max (m+n)/p)
  double wall_ms = 0.0;
};

/// Interpolated order statistic of v at q in [0, 1]; q = 0.5 is the median.
double quantile(std::vector<double> v, double q);

nlohmann::json summarize(const std::vector<TrialRecord>& rows);

void write_csv(const std::string& path, const std::vector<TrialRecord>& rows);

struct ExperimentResult {
  std::vector<TrialRecord> rows;  // empty for the non-sweep kinds
  nlohmann::json summary;
};

TrialRecord run_single_trial(const ExperimentConfig& cfg, double p,
                             std::uint64_t trial_index);

/// Runs the configured experiment; when out_dir is set, persists rows.csv
/// (sweep kinds), coeffs.csv (coefficient verification) and summary.json.
/// Deterministic in (config, seed) regardless of the thread count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace mclab
