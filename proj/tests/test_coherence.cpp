#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mclab/coherence.hpp"
#include "mclab/problem_gen.hpp"

using namespace mclab;

TEST_CASE("coherence against a brute-force recomputation") {
  GroundTruth gt = gen_ground_truth(25, 18, 3, 2, 1.0, 12);
  CoherenceReport rep = coherence(gt.factors, 3);

  const Matrix U = gt.factors.U.leftCols(3);
  const Matrix V = gt.factors.V.leftCols(3);
  double mu_U = 0.0, mu_V = 0.0;
  for (int i = 0; i < 25; ++i) mu_U = std::max(mu_U, U.row(i).squaredNorm());
  for (int i = 0; i < 18; ++i) mu_V = std::max(mu_V, V.row(i).squaredNorm());
  mu_U *= 25.0 / 3.0;
  mu_V *= 18.0 / 3.0;
  double mu1 = std::sqrt(25.0 * 18.0 / 3.0) *
               (U * V.transpose()).cwiseAbs().maxCoeff();

  CHECK(rep.r == 3);
  CHECK(rep.mu_U == doctest::Approx(mu_U));
  CHECK(rep.mu_V == doctest::Approx(mu_V));
  CHECK(rep.mu0 == doctest::Approx(std::max(mu_U, mu_V)));
  CHECK(rep.mu1 == doctest::Approx(mu1));
  CHECK(rep.U_inf == doctest::Approx(U.cwiseAbs().maxCoeff()));
  CHECK(rep.U_2inf == doctest::Approx(norm(U, NormKind::TwoToInfinity)));
}

TEST_CASE("mu1 <= mu0 sqrt(r) across random instances") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    GroundTruth gt = gen_ground_truth(20, 20, 2 + static_cast<int>(s % 3), 2,
                                      1.0, 100 + s);
    CoherenceReport rep = coherence(gt.factors, gt.r);
    CHECK(rep.mu1 <= rep.mu0 * std::sqrt(static_cast<double>(gt.r)) + 1e-9);
    CHECK(rep.mu0 >= 1.0 - 1e-9);  // mu0 is at least 1 for any subspace
  }
}

TEST_CASE("a spike matrix is maximally coherent") {
  // A = e_1 e_1^T: the singular subspace is a coordinate axis.
  Matrix A = Matrix::Zero(10, 10);
  A(0, 0) = 1.0;
  CoherenceReport rep = coherence(svd(A), 1);
  CHECK(rep.mu_U == doctest::Approx(10.0));
  CHECK(rep.mu_V == doctest::Approx(10.0));
}
