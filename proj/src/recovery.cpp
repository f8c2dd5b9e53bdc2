#include "mclab/recovery.hpp"

#include <cmath>

namespace mclab {

double ar2_threshold(const RecoveryConfig& cfg, int m, int n, double p_hat) {
  return cfg.gap_constant * (cfg.K_A + cfg.K_Z) *
         std::sqrt(cfg.r_max * static_cast<double>(m + n) / p_hat);
}

int select_cutoff(const Vector& sigma_hat, double threshold, int r_max) {
  if (sigma_hat.size() < r_max) {
    throw std::invalid_argument("select_cutoff: sigma_hat shorter than r_max");
  }
  for (int s = r_max - 1; s >= 1; --s) {
    if (sigma_hat(s - 1) - sigma_hat(s) >= threshold) return s;
  }
  return r_max;
}

RecoveryResult ar2_recover(const Matrix& observed, std::int64_t omega_size,
                           const RecoveryConfig& cfg) {
  if (omega_size < 1) throw EmptySampleError("ar2_recover: empty sample set");
  if (!observed.allFinite()) {
    throw std::invalid_argument("ar2_recover: non-finite input");
  }
  const int m = static_cast<int>(observed.rows());
  const int n = static_cast<int>(observed.cols());
  if (cfg.r_max < 1 || cfg.r_max > std::min(m, n)) {
    throw std::invalid_argument("ar2_recover: r_max out of range");
  }

  RecoveryResult res;
  res.p_hat = static_cast<double>(omega_size) / (static_cast<double>(m) * n);
  Matrix A_hat = observed / res.p_hat;

  SvdFactors f = truncated_svd(A_hat, cfg.r_max);
  res.sigma_hat = f.sigma;
  res.threshold_used = ar2_threshold(cfg, m, n, res.p_hat);
  res.s = select_cutoff(f.sigma, res.threshold_used, cfg.r_max);
  res.gap_at_s = (res.s < cfg.r_max)
                     ? f.sigma(res.s - 1) - f.sigma(res.s)
                     : 0.0;
  res.A_hat_s = f.U.leftCols(res.s) * f.sigma.head(res.s).asDiagonal() *
                f.V.leftCols(res.s).transpose();
  res.A_out = round_matrix(res.A_hat_s, cfg.eps0);
  return res;
}

double ar_threshold(int m, int n, int r, double mu) {
  return static_cast<double>(std::max(m, n)) / (8.0 * r * mu);
}

Matrix ar_recover_baseline(const Matrix& observed, double p, double mu, int r,
                           double eps0) {
  if (!(p > 0.0) || p > 1.0) {
    throw std::invalid_argument("ar_recover_baseline: p not in (0,1]");
  }
  if (!observed.allFinite()) {
    throw std::invalid_argument("ar_recover_baseline: non-finite input");
  }
  const int m = static_cast<int>(observed.rows());
  const int n = static_cast<int>(observed.cols());
  // Reduce to unit precision by scaling, as the integer-entry formulation
  // assumes eps0 = 1.
  Matrix A_tilde = observed / (p * eps0);
  SvdFactors f = svd(A_tilde);
  const double cut = ar_threshold(m, n, r, mu);
  int s = 0;
  for (int i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) >= cut) s = i + 1;
  }
  Matrix A_hat = Matrix::Zero(m, n);
  if (s > 0) {
    A_hat = f.U.leftCols(s) * f.sigma.head(s).asDiagonal() *
            f.V.leftCols(s).transpose();
  }
  return eps0 * round_matrix(A_hat, 1.0);
}

RecoveryVerdict exact_recovery_verdict(const Matrix& A_out,
                                       const GroundTruth& gt) {
  if (A_out.rows() != gt.A.rows() || A_out.cols() != gt.A.cols()) {
    throw std::invalid_argument("exact_recovery_verdict: shape mismatch");
  }
  Matrix lhs = round_matrix(A_out, gt.eps0);
  Matrix rhs = round_matrix(gt.A, gt.eps0);
  RecoveryVerdict v;
  v.max_abs_dev = (A_out - gt.A).cwiseAbs().maxCoeff();
  for (int i = 0; i < lhs.rows(); ++i) {
    for (int j = 0; j < lhs.cols(); ++j) {
      if (lhs(i, j) != rhs(i, j)) ++v.entry_errors;
    }
  }
  v.exact = v.entry_errors == 0;
  return v;
}

}  // namespace mclab
