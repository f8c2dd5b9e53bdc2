#pragma once

#include "mclab/problem_gen.hpp"

namespace mclab {

struct RecoveryConfig {
  double eps0 = 1.0;
  int r_max = 1;
  double K_A = 0.0;
  double K_Z = 0.0;
  double gap_constant = 20.0;
};

struct RecoveryResult {
  double p_hat = 0.0;
  int s = 0;                 // chosen cutoff, 1-based count of kept components
  Vector sigma_hat;          // leading r_max singular values of p_hat^{-1} * observed
  Matrix A_hat_s;            // rank-s approximation before rounding
  Matrix A_out;              // after grid rounding
  double gap_at_s = 0.0;     // sigma_hat(s) - sigma_hat(s+1), 0 if s == min(m,n)
  double threshold_used = 0.0;
};

/// Gap threshold of the density-estimating recovery pipeline:
/// gap_constant * (K_A + K_Z) * sqrt(r_max (m + n) / p_hat).
double ar2_threshold(const RecoveryConfig& cfg, int m, int n, double p_hat);

RecoveryResult ar2_recover(const Matrix& observed, std::int64_t omega_size,
                           const RecoveryConfig& cfg);

/// Largest s <= r_max - 1 with sigma_hat[s-1] - sigma_hat[s] >= threshold
/// (1-indexed gap sigma_s - sigma_{s+1}); r_max when no gap qualifies.
int select_cutoff(const Vector& sigma_hat, double threshold, int r_max);

/// Singular value cutoff of the known-density baseline, N / (8 r mu) with
/// N = max(m, n).
double ar_threshold(int m, int n, int r, double mu);

/// Known-density baseline: rescale by the true p, keep components with
/// sigma >= N/(8 r mu) (after reducing to the unit grid by scaling with
/// 1/eps0), round to the grid.
Matrix ar_recover_baseline(const Matrix& observed, double p, double mu, int r,
                           double eps0);

struct RecoveryVerdict {
  bool exact = false;
  std::int64_t entry_errors = 0;
  double max_abs_dev = 0.0;
};

RecoveryVerdict exact_recovery_verdict(const Matrix& A_out,
                                       const GroundTruth& gt);

}  // namespace mclab
