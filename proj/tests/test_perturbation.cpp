#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mclab/coherence.hpp"
#include "mclab/perturbation.hpp"

using namespace mclab;

namespace {
Matrix random_matrix(int m, int n, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix A(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) A(i, j) = rng.gaussian();
  }
  return A;
}

GroundTruth fixture(std::uint64_t seed = 21) {
  Vector sig(4);
  sig << 10.0, 8.0, 6.0, 4.0;
  return gen_spectral_truth(16, 14, sig, seed);
}
}  // namespace

TEST_CASE("report ratios match a dense recomputation") {
  GroundTruth gt = fixture();
  Matrix E = 0.05 * random_matrix(16, 14, 3);
  std::vector<int> S{0, 1};
  PerturbationReport rep = perturbation_report(gt, E, S);

  const int r = gt.r;
  SymmetrizedSystem sys = build_symmetrized_system(gt.factors, r);
  Matrix symE = symmetrize(E);
  double lam_S = gt.sigma_S(S), del_S = gt.Delta_S(S);
  double Eop = svd(E).sigma(0);
  CHECK(rep.sigma_S == doctest::Approx(lam_S));
  CHECK(rep.Delta_S == doctest::Approx(del_S));
  CHECK(rep.E_op == doctest::Approx(Eop).epsilon(1e-8));

  Matrix WEW = sys.W.transpose() * symE * sys.W;
  double R1 = std::max(Eop / lam_S,
                       2.0 * r * WEW.cwiseAbs().maxCoeff() / del_S);
  CHECK(rep.R1 == doctest::Approx(R1).epsilon(1e-8));
  CHECK(rep.R2 ==
        doctest::Approx(std::sqrt(2.0 * r) * Eop / std::sqrt(lam_S * del_S))
            .epsilon(1e-8));

  Matrix W2 = sys.W.transpose() * symE * symE * sys.W;
  double cross = 0.0;
  for (int i = 0; i < 2 * r; ++i) {
    for (int j = 0; j < 2 * r; ++j) {
      int d = std::abs(i - j);
      if (d == 0 || d == r) continue;
      cross = std::max(cross, std::abs(W2(i, j)));
    }
  }
  CHECK(rep.R3 == doctest::Approx(2.0 * r * cross / (lam_S * del_S)).epsilon(1e-8));

  const Matrix U = gt.factors.U.leftCols(r), V = gt.factors.V.leftCols(r);
  CHECK(rep.UEV_inf ==
        doctest::Approx((U.transpose() * E * V).cwiseAbs().maxCoeff()));
  Matrix G = U.transpose() * E * E.transpose() * U;
  Matrix H = V.transpose() * E.transpose() * E * V;
  double y = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (i != j) y = std::max(y, 0.5 * (std::abs(G(i, j)) + std::abs(H(i, j))));
    }
  }
  CHECK(rep.y == doctest::Approx(y));
  CHECK(rep.hypothesis_ok == (std::max(rep.R1, rep.R2) <= 0.125 + 1e-12));
}

TEST_CASE("y never exceeds the squared operator norm") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    GroundTruth gt = fixture(s + 100);
    Matrix E = random_matrix(16, 14, s + 500);
    PerturbationReport rep = perturbation_report(gt, E, {0, 1, 2, 3});
    CHECK(rep.y <= rep.E_op * rep.E_op + 1e-9);
  }
}

TEST_CASE("deterministic tau values are normalized row maxima") {
  GroundTruth gt = fixture();
  Matrix E = 0.1 * random_matrix(16, 14, 7);
  PerturbationReport rep = perturbation_report(gt, E, {0, 1});
  const int r = gt.r;
  const Matrix U = gt.factors.U.leftCols(r), V = gt.factors.V.leftCols(r);
  // The a = 0 term already contributes ||U||_{2,inf}/sqrt(r).
  CHECK(rep.tau1_det >= norm(U, NormKind::TwoToInfinity) / std::sqrt(r) - 1e-12);
  CHECK(rep.tau2_det >= norm(V, NormKind::TwoToInfinity) / std::sqrt(r) - 1e-12);
  CHECK(rep.tau1_det <= 1.0 + 1e-9);  // rows of an orthonormal frame
  CHECK(rep.tau2_det <= 1.0 + 1e-9);
  CHECK(rep.tau1_rand == 0.0);  // not requested
}

TEST_CASE("random-model closed forms") {
  GroundTruth gt = fixture();
  std::vector<int> S{0, 1};
  double vs = 0.3, M = 2.0;
  RandomDkQuantities q = random_dk_quantities(gt, vs, M, S);
  const int r = gt.r;
  const double N = 30.0, lg = std::log(N);
  const Matrix U = gt.factors.U.leftCols(r), V = gt.factors.V.leftCols(r);
  double u2 = norm(U, NormKind::TwoToInfinity), v2 = norm(V, NormKind::TwoToInfinity);
  double t1 = u2 * lg / std::sqrt(r) + M * v2 * lg * lg * lg / std::sqrt(r * N) +
              std::pow(lg, 1.5) / std::sqrt(N);
  CHECK(q.tau1_rand == doctest::Approx(t1));
  double sS = gt.sigma_S(S), dS = gt.Delta_S(S);
  double uinf = U.cwiseAbs().maxCoeff(), vinf = V.cwiseAbs().maxCoeff();
  double RS = vs * std::sqrt(N) / sS +
              r * vs * (std::sqrt(lg) + M * uinf * vinf * lg) / dS +
              2.0 * r * vs * vs * N / (dS * sS);
  CHECK(q.R_S == doctest::Approx(RS));
  PerturbationReport rep =
      perturbation_report(gt, 0.01 * random_matrix(16, 14, 2), S, vs, M);
  CHECK(rep.tau1_rand == doctest::Approx(q.tau1_rand));
  CHECK(rep.R_S == doctest::Approx(q.R_S));
}

TEST_CASE("degenerate spectra are rejected") {
  Vector sig(2);
  sig << 5.0, 5.0;
  GroundTruth gt = gen_spectral_truth(10, 10, sig, 1);
  CHECK_THROWS_AS(perturbation_report(gt, Matrix::Zero(10, 10), {0}),
                  DegenerateSpectrumError);
}

TEST_CASE("subspace difference against the 2x2 rotation oracle") {
  // A = diag(2, 1); a small symmetric coupling rotates the singular frames
  // by theta with tan(2 theta) = 2 eps (lam1 + lam2) / (lam1^2 - lam2^2)
  // (from the eigenproblem of (A+E)^T (A+E) up to O(eps^2)).
  const double eps = 1e-4;
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 1.0;
  GroundTruth gt;
  gt.A = A;
  gt.factors = svd(A);
  gt.r = 2;
  gt.eps0 = 1.0;
  gt.K_A = 2.0;
  gt.delta = {1.0, 1.0};
  gt.Delta = {1.0, 1.0};

  Matrix E = Matrix::Zero(2, 2);
  E(0, 1) = eps;
  E(1, 0) = eps;
  SubspaceDiff d = subspace_diff(gt, E, {0});
  double theta = 0.5 * std::atan2(2.0 * eps * 3.0, 3.0);  // = atan(2 eps)/2 here
  CHECK(d.op_norm == doctest::Approx(std::abs(std::sin(theta))).epsilon(1e-3));
  CHECK(d.well_separated);
  CHECK(d.is_prefix);
  CHECK((d.proj_diff_V - d.proj_diff_V.transpose()).norm() < 1e-12);
}

TEST_CASE("projector difference norms and prefix approximation") {
  GroundTruth gt = fixture();
  Matrix E = 0.05 * random_matrix(16, 14, 11);
  SubspaceDiff d = subspace_diff(gt, E, {0, 1});
  CHECK(d.op_norm <= 1.0 + 1e-9);  // difference of two projectors
  CHECK(d.inf_norm <= d.two_inf_norm + 1e-12);
  CHECK(d.two_inf_norm <= std::sqrt(2.0) * 1.0 + 1e-9);
  CHECK(d.is_prefix);
  SvdFactors tf = svd(gt.A + E);
  Matrix expect = tf.U.leftCols(2) * tf.sigma.head(2).asDiagonal() *
                      tf.V.leftCols(2).transpose() -
                  gt.factors.U.leftCols(2) * gt.factors.sigma.head(2).asDiagonal() *
                      gt.factors.V.leftCols(2).transpose();
  CHECK((d.approx_diff - expect).norm() < 1e-8);
  CHECK(d.approx_inf == doctest::Approx(expect.cwiseAbs().maxCoeff()));

  SubspaceDiff mid = subspace_diff(gt, E, {1, 2});
  CHECK_FALSE(mid.is_prefix);
  CHECK(mid.approx_diff.size() == 0);
}

TEST_CASE("completion bound formula by hand") {
  GroundTruth gt = fixture();
  CoherenceReport rep = coherence(gt.factors, gt.r);
  double p = 0.5, K = 1.5;
  int s = 2;
  DkMatcomBound b = dk_matcom_bound(gt, p, K, rep.mu0, s);
  const double N = 30.0, lg = std::log(N), mn = std::sqrt(16.0 * 14.0);
  double sig_s = gt.factors.sigma(s - 1);
  double del_s = gt.delta[s - 1];
  int r = gt.r;
  double expect = (lg + rep.mu0) * lg * lg / mn * r * sig_s *
                  (K / sig_s * std::sqrt(N / p) +
                   r * K * std::sqrt(lg) / (del_s * std::sqrt(p)) +
                   r * r * rep.mu0 * K * lg / (p * del_s * mn));
  CHECK(b.value == doctest::Approx(expect));
  CHECK(b.gap_ok == (del_s >= 40.0 * r * K * std::sqrt(N / p)));
  CHECK(b.density_ok == (p >= (1.0 / 16 + 1.0 / 14) * lg));
}

TEST_CASE("entrywise bound family shares the base factor") {
  GroundTruth gt = fixture();
  Matrix E = 0.05 * random_matrix(16, 14, 13);
  std::vector<int> S{0, 1};
  PerturbationReport rep = perturbation_report(gt, E, S);
  DeterministicDkBounds b = deterministic_dk_bounds(rep, gt, S);
  int r = gt.r;
  double base = r * (rep.E_op / rep.sigma_S +
                     2.0 * r * rep.UEV_inf / rep.Delta_S +
                     2.0 * r * rep.y / (rep.Delta_S * rep.sigma_S));
  CHECK(b.entry_bound == doctest::Approx(rep.tau1_det * rep.tau1_det * base));
  CHECK(b.row_bound == doctest::Approx(rep.tau1_det * base));
  CHECK(b.approx_bound ==
        doctest::Approx(rep.tau1_det * rep.tau2_det * rep.sigma_S * base));
  CHECK(b.hypothesis_ok == rep.hypothesis_ok);
}

TEST_CASE("series check converges on a small instance") {
  GroundTruth gt = fixture();
  Matrix E = 0.02 * random_matrix(16, 14, 17);
  std::vector<int> S{0, 1};
  ContourSpec contour = build_contour(gt.factors.sigma.head(4),
                                      svd(gt.A + E).sigma.head(4), S, 4,
                                      gt.Delta_S(S), 128);
  SeriesCheck chk = resolvent_series_check(gt, E, S, 0, 8, contour);
  CHECK(chk.hypothesis_ok);
  CHECK(chk.partial_sum_errors.back() < 1e-8 * std::max(1.0, chk.exact_norm));
  for (size_t g = 1; g < chk.decay_ratios.size(); ++g) {
    CHECK(chk.decay_ratios[g] < 0.6);
  }
  CHECK_THROWS_AS(resolvent_series_check(gt, E, {1, 2}, 1, 4, contour),
                  std::invalid_argument);  // nu = 1 needs a prefix set
}

TEST_CASE("moment bound sampler guards its hypothesis") {
  CHECK_THROWS_AS(semi_isotropic_check(40, 40, 1.0, 3, 2, 5, 1, true),
                  std::invalid_argument);
  SemiIsoResult r = semi_isotropic_check(40, 40, 1.0, 2, 2, 25, 1, false);
  CHECK(r.trials == 25);
  CHECK(r.odd_failures.size() == 3);   // a = 0, 1, 2
  CHECK(r.even_failures.size() == 3);
  CHECK(r.D_odd == 8192.0);
  CHECK(r.D_even == 1024.0);
  for (std::int64_t f : r.odd_failures) CHECK(f == 0);
  for (std::int64_t f : r.even_failures) CHECK(f == 0);
  CHECK(r.odd_tail == doctest::Approx(std::pow(32.0 / 8192.0, 4.0)));
  CHECK(r.even_tail == doctest::Approx(std::pow(16.0 / 1024.0, 4.0)));
}

TEST_CASE("masked-noise norm frequencies") {
  GroundTruth gt = gen_ground_truth(30, 30, 2, 2, 1.0, 19);
  BasicEBoundsResult r = basic_E_bounds_check(
      gt, 0.5, NoiseSpec{NoiseLaw::UniformBounded, 1.0}, 30, 5);
  CHECK(r.trials == 30);
  CHECK(r.freq_cross == 1.0);  // deterministic inequality
  CHECK(r.freq_op >= 0.9);     // high-probability event
}
