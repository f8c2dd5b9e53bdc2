#pragma once

#include "mclab/contour.hpp"
#include "mclab/problem_gen.hpp"

namespace mclab {

struct DegenerateSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every scalar entering the subspace perturbation bounds, computed by
/// direct dense linear algebra from a concrete (A, E, S).
struct PerturbationReport {
  double E_op = 0.0;      // ||E||
  double UEV_inf = 0.0;   // ||U^T E V||_inf (max absolute entry)
  double y = 0.0;         // (1/2) max_{i!=j} (|u_i^T EE^T u_j| + |v_i^T E^T E v_j|)
  double tau1_det = 0.0;  // max over powers a of normalized row norms, U side
  double tau2_det = 0.0;  // V side
  double tau1_rand = 0.0;  // closed-form random-model analogue (0 unless requested)
  double tau2_rand = 0.0;
  double R1 = 0.0;  // ||E||/lambda_S v 2r||W^T sym(E) W||_inf / Delta_S
  double R2 = 0.0;  // sqrt(2r)||E|| / sqrt(lambda_S Delta_S)
  double R3 = 0.0;  // (2r/lambda_S Delta_S) max off-pair |w_i^T sym(E)^2 w_j|
  double R_S = 0.0;  // random-model composite ratio (0 unless requested)
  double sigma_S = 0.0;
  double Delta_S = 0.0;
  bool hypothesis_ok = false;  // R1 v R2 <= 1/8
};

struct RandomDkQuantities {
  double tau1_rand = 0.0;
  double tau2_rand = 0.0;
  double R_S = 0.0;
};

/// Closed forms of the random-noise model: with N = m + n,
///   tau1 = ||U||_{2,inf} log N / sqrt(r) + M ||V||_{2,inf} log^3 N / sqrt(rN)
///          + log^{3/2} N / sqrt(N)
/// (tau2 swaps U and V), and
///   R_S = varsigma sqrt(N)/sigma_S
///         + r varsigma (sqrt(log N) + M ||U||_inf ||V||_inf log N)/Delta_S
///         + 2 r varsigma^2 N / (Delta_S sigma_S).
/// The completion context substitutes varsigma = K/sqrt(p), M = 1/sqrt(p).
RandomDkQuantities random_dk_quantities(const GroundTruth& gt, double varsigma,
                                        double M_param,
                                        const std::vector<int>& S);

/// varsigma <= 0 leaves the random-model fields at zero.
PerturbationReport perturbation_report(const GroundTruth& gt, const Matrix& E,
                                       const std::vector<int>& S,
                                       double varsigma = 0.0,
                                       double M_param = 0.0);

struct SubspaceDiff {
  std::vector<int> S;
  Matrix proj_diff_V;  // V~_S V~_S^T - V_S V_S^T
  double op_norm = 0.0;
  double inf_norm = 0.0;
  double two_inf_norm = 0.0;
  bool well_separated = false;  // Delta_S > 2||E|| (Weyl-safe pairing)
  bool is_prefix = false;       // S = {0, ..., s-1}
  Matrix approx_diff;           // A~_s - A_s, only when is_prefix
  double approx_inf = 0.0;
};

SubspaceDiff subspace_diff(const GroundTruth& gt, const Matrix& E,
                           const std::vector<int>& S);

struct DkMatcomBound {
  double value = 0.0;
  bool gap_ok = false;      // delta_s >= 40 r K sqrt(N/p)
  bool density_ok = false;  // p >= (1/m + 1/n) log N
};

/// Right-hand side of the infinity-norm approximation bound with unit
/// constant: with N = m + n,
///   (log N + mu0) log^2 N / sqrt(mn) * r sigma_s *
///   (K/sigma_s sqrt(N/p) + r K sqrt(log N)/(delta_s sqrt(p))
///    + r^2 mu0 K log N/(p delta_s sqrt(mn))).
/// s is 1-based.
DkMatcomBound dk_matcom_bound(const GroundTruth& gt, double p, double K,
                              double mu0, int s);

struct DeterministicDkBounds {
  double entry_bound = 0.0;  // tau1^2 * r * base
  double row_bound = 0.0;    // tau1   * r * base
  double approx_bound = 0.0; // tau1 * tau2 * sigma_S * r * base
  bool hypothesis_ok = false;
};

/// base = ||E||/sigma_S + 2r||U^T E V||_inf/Delta_S + 2ry/(Delta_S sigma_S);
/// evaluated with unit constant. Values are returned even when the
/// smallness hypothesis fails, flagged accordingly.
DeterministicDkBounds deterministic_dk_bounds(const PerturbationReport& report,
                                              const GroundTruth& gt,
                                              const std::vector<int>& S);

struct SeriesCheck {
  ContourSpec contour;
  int gamma_max = 0;
  double exact_norm = 0.0;                 // ||exact difference||_F
  std::vector<double> term_norms;          // Frobenius norm per gamma
  std::vector<double> partial_sum_errors;  // ||partial sum - exact||_F per gamma
  std::vector<double> decay_ratios;        // term_norms[g]/term_norms[g-1]
  bool hypothesis_ok = false;
};

/// Compares the contour-quadrature partial sums of the resolvent series
/// against the directly computed difference: the projector difference of the
/// symmetrized systems for nu = 0, sym(A~_S - A_S) for nu = 1.
SeriesCheck resolvent_series_check(const GroundTruth& gt, const Matrix& E,
                                   const std::vector<int>& S, int nu,
                                   int gamma_max, const ContourSpec& contour);

struct SemiIsoResult {
  int a_max = 0;
  int p_moment = 0;
  double M_param = 0.0;
  std::int64_t trials = 0;
  double D_odd = 8192.0;  // 2^13
  double D_even = 1024.0; // 2^10
  std::vector<std::int64_t> odd_failures;   // indexed by a
  std::vector<std::int64_t> even_failures;  // indexed by a
  double odd_tail = 0.0;   // (2^5/D_odd)^{2p}
  double even_tail = 0.0;  // (2^4/D_even)^{2p}
  std::vector<bool> odd_hypothesis;   // m+n >= 2^8 M^2 p^6 (2a+1)^4
  std::vector<bool> even_hypothesis;  // m+n >= 2^8 M^2 p^6 (2a)^4
};

/// Monte Carlo check of the row-vs-power bounds: per trial draws a unit-
/// variance noise matrix (entry law chosen from M_param), random orthonormal
/// U, V and a random row index k, then tests
///   ||e_k^T (E^T E)^a E^T U|| <= D r^{1/2} p^{3/2} sqrt(2a+1)
///       (16 p^{3/2} (2a+1)^{3/2} M ||U||_{2,inf}/sqrt(r) + 1) [2(m+n)]^a
/// and
///   ||e_k^T (E^T E)^a V|| <= D p ||V||_{2,inf} [2(m+n)]^a.
/// With enforce_hypothesis the dimension condition is mandatory; otherwise
/// out-of-range (a, p) pairs are still run and flagged.
SemiIsoResult semi_isotropic_check(int m, int n, double M_param, int a_max,
                                   int p_moment, std::int64_t trials,
                                   std::uint64_t seed,
                                   bool enforce_hypothesis = true);

struct BasicEBoundsResult {
  std::int64_t trials = 0;
  double freq_op = 0.0;        // ||E|| <= 1.9 varsigma sqrt(m+n)
  double freq_cross = 0.0;     // max cross term <= 2||E||^2 (deterministic)
  double freq_bilinear = 0.0;  // max |u_i^T E v_j| <= 2 varsigma (sqrt(log N)
                               //   + M ||U||_inf ||V||_inf log N)
};

/// Frequencies over masked-observation noise draws, with the completion
/// substitution varsigma = (K_A + K_Z)/sqrt(p), M = 1/sqrt(p).
BasicEBoundsResult basic_E_bounds_check(const GroundTruth& gt, double p,
                                        const NoiseSpec& noise,
                                        std::int64_t trials,
                                        std::uint64_t seed);

}  // namespace mclab
