#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mclab/linalg.hpp"

namespace mclab {

struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContourError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Circle {
  double center = 0.0;  // on the real axis
  double radius = 0.0;
};

/// Two circles on the real axis: one around the positive eigenvalue cluster
/// of the selected indices, one around its mirror image. Built so that the
/// selected eigenvalues of both the clean and the perturbed dilation sit
/// inside with clearance >= Delta_S/4, while 0 and every other eigenvalue
/// stays outside with the same clearance.
struct ContourSpec {
  Circle positive;
  Circle negative;
  int node_count = 2048;
};

/// sigma: clean singular values (descending, length >= r); sigma_tilde:
/// perturbed ones (may be empty when only the clean spectrum matters);
/// S: 0-based subset of [0, r); delta_S: separation used for the clearance.
ContourSpec build_contour(const Vector& sigma, const Vector& sigma_tilde,
                          const std::vector<int>& S, int r, double delta_S,
                          int node_count = 2048);

/// Scalar coefficient attached to an index sequence I in [0, 2r):
///   (1/2*pi*i) oint z^{nu - gamma - 1} prod_k lambda_{i_k} / (z - lambda_{i_k}) dz
/// over a contour enclosing exactly the eigenvalues whose base index lies in
/// S. lambda has length 2r (lambda_i = sigma_i, lambda_{i+r} = -sigma_i).
/// Computed exactly: poles are taken as the exact rationals represented by
/// the input doubles and the residues evaluated in rational arithmetic.
double integral_coefficient_residue(const std::vector<int>& I,
                                    const Vector& lambda,
                                    const std::vector<int>& S, int nu,
                                    int gamma);

/// Numerical oracle for the same coefficient: trapezoidal rule on the two
/// circles, doubling the node count until the value is stable to 1e-9.
double integral_coefficient_quadrature(const std::vector<int>& I,
                                       const Vector& lambda,
                                       const std::vector<int>& S, int nu,
                                       int gamma, const ContourSpec& contour);

struct AlphaBeta {
  std::vector<int> alpha;  // size h + 1; alpha[0], alpha[h] >= 0, middle >= 1
  std::vector<int> beta;   // size h; all >= 1
};

/// All (alpha, beta) with sum(alpha) + sum(beta) = gamma + 1. Empty when h is
/// outside [1, floor(gamma/2) + 1].
std::vector<AlphaBeta> enumerate_partitions(int gamma, int h);

/// Closed-form count: sum over beta of binom(beta-1, h-1)*binom(gamma+2-beta, h).
std::int64_t partition_count(int gamma, int h);

struct CoefficientBoundSample {
  std::vector<int> I;
  std::vector<int> S;
  int nu = 0;
  int gamma = 0;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct CoefficientBoundTable {
  std::vector<CoefficientBoundSample> samples;
  std::int64_t violations = 0;
  double max_quadrature_gap = 0.0;  // worst relative residue-vs-quadrature gap
};

/// Random spectra on an exact 1/8 grid; each sampled coefficient is checked
/// against the closed-form bound
///   L_nu (1 + Delta_S/lambda_S)^{beta_{S^c}} binom(gamma + beta_S - 2, beta_S - 1)
///     / (lambda_S^{gamma+1-beta} Delta_S^{beta-1}),
/// with L_0 = 2, L_1 = sigma_s, and cross-checked against the quadrature
/// oracle.
CoefficientBoundTable verify_coefficient_bounds(int samples, int gamma_max,
                                                int r, std::uint64_t seed);

/// Per-order terms of the resolvent perturbation series: entry gamma - 1 is
///   oint z^nu/(2 pi i) [R(z) sym(E)]^gamma R(z) dz
/// computed by trapezoidal quadrature on the contour, where R is the
/// resolvent of sym(A) in its eigendecomposition form.
std::vector<Matrix> resolvent_series_terms(const SymmetrizedSystem& sys,
                                           const Matrix& E, int nu,
                                           int gamma_max,
                                           const ContourSpec& contour);

/// Brute-force assembly of the gamma-th series term from partitions,
/// residue coefficients and monomial matrices, compared against direct
/// contour quadrature of the same term. Returns the relative Frobenius
/// residual. Kept tiny (r <= 2, gamma <= 4) since the index sum is (2r)^beta.
double expansion_consistency_check(const SymmetrizedSystem& sys,
                                   const Matrix& E, const std::vector<int>& S,
                                   int nu, int gamma,
                                   const ContourSpec& contour);

}  // namespace mclab
