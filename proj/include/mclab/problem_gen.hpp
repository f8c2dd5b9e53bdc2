#pragma once

#include <cstdint>
#include <vector>

#include "mclab/linalg.hpp"
#include "mclab/rng.hpp"

namespace mclab {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySampleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hidden low-rank matrix with grid-aligned entries and spectral metadata.
struct GroundTruth {
  Matrix A;
  SvdFactors factors;
  int r = 0;
  double eps0 = 1.0;
  double K_A = 0.0;  // ||A||_inf

  // delta_k = sigma_k - sigma_{k+1} (sigma_{r+1} = 0), 0-based storage.
  std::vector<double> delta;
  // Delta_k = min(delta_k, delta_{k-1}); Delta_1 = delta_1.
  std::vector<double> Delta;

  int m() const { return static_cast<int>(A.rows()); }
  int n() const { return static_cast<int>(A.cols()); }

  /// min sigma_i over S (S holds 0-based indices into [0, r)).
  double sigma_S(const std::vector<int>& S) const;
  /// min |sigma_i - sigma_j| over i in S, j in [0, r) \ S; sigma_{r+1} = 0
  /// counts as outside, so for S = [r] this is sigma_r.
  double Delta_S(const std::vector<int>& S) const;
};

struct SampleMask {
  int m = 0, n = 0;
  double p = 0.0;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  std::int64_t omega_size = 0;
  double p_hat = 0.0;
  double rho = 0.0;  // p_hat / p
};

enum class NoiseLaw { Zero, UniformBounded, RademacherScaled };

struct NoiseSpec {
  NoiseLaw law = NoiseLaw::Zero;
  double K_Z = 0.0;
};

struct Observation {
  Matrix observed;       // (A + Z) on the mask, 0 elsewhere
  SampleMask mask;
  Matrix rescaled_true;  // p^{-1} * observed
  Matrix rescaled_est;   // p_hat^{-1} * observed
  Matrix E;              // rescaled_true - A
};

GroundTruth gen_ground_truth(int m, int n, int r, int factor_bound, double eps0,
                             std::uint64_t seed);

/// Ground truth with a prescribed spectrum: A = U diag(sigma) V^T with
/// seeded random orthonormal frames. Entries are generally not grid-aligned;
/// intended for perturbation studies, not recovery.
GroundTruth gen_spectral_truth(int m, int n, const Vector& sigma,
                               std::uint64_t seed);
SampleMask sample_mask(int m, int n, double p, std::uint64_t seed);
Matrix gen_noise(int m, int n, const NoiseSpec& spec, std::uint64_t seed);
Observation observe(const GroundTruth& gt, const SampleMask& mask,
                    const Matrix& Z);

}  // namespace mclab
