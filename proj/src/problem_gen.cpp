#include "mclab/problem_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mclab {

double GroundTruth::sigma_S(const std::vector<int>& S) const {
  if (S.empty()) throw std::invalid_argument("sigma_S: empty S");
  double v = std::numeric_limits<double>::infinity();
  for (int i : S) {
    if (i < 0 || i >= r) throw std::invalid_argument("sigma_S: index out of range");
    v = std::min(v, factors.sigma(i));
  }
  return v;
}

double GroundTruth::Delta_S(const std::vector<int>& S) const {
  if (S.empty()) throw std::invalid_argument("Delta_S: empty S");
  std::vector<bool> in(r, false);
  for (int i : S) {
    if (i < 0 || i >= r) throw std::invalid_argument("Delta_S: index out of range");
    in[i] = true;
  }
  double v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < r; ++i) {
    if (!in[i]) continue;
    for (int j = 0; j < r; ++j) {
      if (in[j]) continue;
      v = std::min(v, std::abs(factors.sigma(i) - factors.sigma(j)));
    }
    // sigma_{r+1} = 0 lies outside every S.
    v = std::min(v, factors.sigma(i));
  }
  return v;
}

namespace {
void fill_gaps(GroundTruth& gt) {
  const int r = gt.r;
  gt.delta.resize(r);
  gt.Delta.resize(r);
  for (int k = 0; k < r; ++k) {
    double next = (k + 1 < r) ? gt.factors.sigma(k + 1) : 0.0;
    gt.delta[k] = gt.factors.sigma(k) - next;
  }
  for (int k = 0; k < r; ++k) {
    gt.Delta[k] = (k == 0) ? gt.delta[0] : std::min(gt.delta[k], gt.delta[k - 1]);
  }
}
}  // namespace

GroundTruth gen_ground_truth(int m, int n, int r, int factor_bound, double eps0,
                             std::uint64_t seed) {
  if (r < 1 || r > std::min(m, n)) {
    throw std::invalid_argument("gen_ground_truth: r out of range");
  }
  if (factor_bound < 1) throw std::invalid_argument("gen_ground_truth: b < 1");
  if (!(eps0 > 0)) throw std::invalid_argument("gen_ground_truth: eps0 <= 0");

  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RngStream rng(seed, static_cast<std::uint64_t>(attempt));
    Matrix X(m, r), Y(n, r);
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < m; ++i) {
        X(i, j) = static_cast<double>(rng.uniform_int(-factor_bound, factor_bound));
      }
      for (int i = 0; i < n; ++i) {
        Y(i, j) = static_cast<double>(rng.uniform_int(-factor_bound, factor_bound));
      }
    }
    GroundTruth gt;
    gt.A = eps0 * (X * Y.transpose());
    gt.factors = svd(gt.A);
    if (gt.factors.numerical_rank != r) continue;
    gt.r = r;
    gt.eps0 = eps0;
    gt.K_A = norm(gt.A, NormKind::Infinity);
    fill_gaps(gt);
    return gt;
  }
  throw GenerationError(
      "gen_ground_truth: 100 consecutive rank-deficient draws; "
      "parameters look degenerate");
}

GroundTruth gen_spectral_truth(int m, int n, const Vector& sigma,
                               std::uint64_t seed) {
  const int r = static_cast<int>(sigma.size());
  if (r < 1 || r > std::min(m, n)) {
    throw std::invalid_argument("gen_spectral_truth: rank out of range");
  }
  for (int i = 0; i < r; ++i) {
    if (!(sigma(i) > 0) || (i > 0 && sigma(i) > sigma(i - 1))) {
      throw std::invalid_argument(
          "gen_spectral_truth: sigma must be positive and descending");
    }
  }
  RngStream rng(seed);
  auto frame = [&](int rows) {
    Matrix G(rows, r);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < r; ++j) G(i, j) = rng.gaussian();
    }
    Eigen::HouseholderQR<Matrix> qr(G);
    return Matrix(qr.householderQ() * Matrix::Identity(rows, r));
  };
  Matrix U = frame(m), V = frame(n);

  GroundTruth gt;
  gt.A = U * sigma.asDiagonal() * V.transpose();
  gt.factors = svd(gt.A);
  gt.r = r;
  gt.eps0 = 1.0;
  gt.K_A = norm(gt.A, NormKind::Infinity);
  fill_gaps(gt);
  return gt;
}

SampleMask sample_mask(int m, int n, double p, std::uint64_t seed) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("sample_mask: p not in (0,1]");
  SampleMask sm;
  sm.m = m;
  sm.n = n;
  sm.p = p;
  sm.mask.resize(m, n);
  RngStream rng(seed);
  std::int64_t count = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      bool hit = p >= 1.0 ? true : rng.bernoulli(p);
      sm.mask(i, j) = hit;
      count += hit;
    }
  }
  if (count == 0) {
    throw EmptySampleError("sample_mask: empty sample set");
  }
  sm.omega_size = count;
  sm.p_hat = static_cast<double>(count) / (static_cast<double>(m) * n);
  sm.rho = sm.p_hat / p;
  return sm;
}

Matrix gen_noise(int m, int n, const NoiseSpec& spec, std::uint64_t seed) {
  Matrix Z = Matrix::Zero(m, n);
  if (spec.law == NoiseLaw::Zero) return Z;
  if (!(spec.K_Z > 0)) throw std::invalid_argument("gen_noise: K_Z <= 0");
  RngStream rng(seed);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      Z(i, j) = spec.law == NoiseLaw::UniformBounded
                    ? rng.uniform(-spec.K_Z, spec.K_Z)
                    : spec.K_Z * rng.rademacher();
    }
  }
  return Z;
}

Observation observe(const GroundTruth& gt, const SampleMask& mask,
                    const Matrix& Z) {
  if (mask.m != gt.m() || mask.n != gt.n() || Z.rows() != gt.m() ||
      Z.cols() != gt.n()) {
    throw std::invalid_argument("observe: shape mismatch");
  }
  if (mask.omega_size == 0) throw EmptySampleError("observe: empty sample set");
  Observation obs;
  obs.mask = mask;
  obs.observed = Matrix::Zero(gt.m(), gt.n());
  for (int i = 0; i < gt.m(); ++i) {
    for (int j = 0; j < gt.n(); ++j) {
      if (mask.mask(i, j)) obs.observed(i, j) = gt.A(i, j) + Z(i, j);
    }
  }
  obs.rescaled_true = obs.observed / mask.p;
  obs.rescaled_est = obs.observed / mask.p_hat;
  obs.E = obs.rescaled_true - gt.A;
  return obs;
}

}  // namespace mclab
