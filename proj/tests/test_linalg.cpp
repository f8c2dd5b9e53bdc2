#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mclab/linalg.hpp"
#include "mclab/rng.hpp"

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
}  // namespace

TEST_CASE("svd reconstructs and is orthonormal") {
  Matrix A = random_matrix(10, 7, 42);
  SvdFactors f = svd(A);
  CHECK((f.reconstruct() - A).norm() < 1e-10 * A.norm());
  CHECK((f.U.transpose() * f.U - Matrix::Identity(7, 7)).norm() < 1e-10);
  CHECK((f.V.transpose() * f.V - Matrix::Identity(7, 7)).norm() < 1e-10);
  for (int i = 1; i < f.sigma.size(); ++i) CHECK(f.sigma(i) <= f.sigma(i - 1));
  CHECK(f.numerical_rank == 7);
}

TEST_CASE("svd sign convention is deterministic") {
  Matrix A = random_matrix(8, 8, 7);
  SvdFactors f1 = svd(A), f2 = svd(A);
  CHECK(f1.U == f2.U);
  CHECK(f1.V == f2.V);
  for (int j = 0; j < f1.U.cols(); ++j) {
    int imax = 0;
    for (int i = 1; i < f1.U.rows(); ++i) {
      if (std::abs(f1.U(i, j)) > std::abs(f1.U(imax, j))) imax = i;
    }
    CHECK(f1.U(imax, j) > 0.0);
  }
}

TEST_CASE("truncated_svd matches the top block of the full svd") {
  Matrix A = random_matrix(9, 6, 3);
  SvdFactors full = svd(A);
  SvdFactors part = truncated_svd(A, 3);
  CHECK(part.sigma.size() == 3);
  CHECK((part.sigma - full.sigma.head(3)).norm() < 1e-12);
  CHECK((part.U - full.U.leftCols(3)).norm() < 1e-10);
  CHECK((part.reconstruct() -
         full.U.leftCols(3) * full.sigma.head(3).asDiagonal() *
             full.V.leftCols(3).transpose())
            .norm() < 1e-10);
}

TEST_CASE("norm chain inf <= 2inf <= op <= fro") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    RngStream rng(s);
    int m = 1 + static_cast<int>(rng.uniform_int(1, 12));
    int n = 1 + static_cast<int>(rng.uniform_int(1, 12));
    Matrix A = random_matrix(m, n, s + 1000);
    double ninf = norm(A, NormKind::Infinity);
    double n2inf = norm(A, NormKind::TwoToInfinity);
    double nop = norm(A, NormKind::Operator);
    double nfro = norm(A, NormKind::Frobenius);
    double tol = 1e-10 * (1 + nfro);
    CHECK(ninf <= n2inf + tol);
    CHECK(n2inf <= nop + tol);
    CHECK(nop <= nfro + tol);
  }
}

TEST_CASE("norm values against hand computations") {
  Matrix A(2, 2);
  A << 3, 0, 0, -4;
  CHECK(norm(A, NormKind::Infinity) == 4.0);
  CHECK(norm(A, NormKind::Operator) == doctest::Approx(4.0));
  CHECK(norm(A, NormKind::Frobenius) == doctest::Approx(5.0));
  CHECK(norm(A, NormKind::TwoToInfinity) == doctest::Approx(4.0));
}

TEST_CASE("power iteration agrees with the svd operator norm") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Matrix A = random_matrix(15, 11, s + 77);
    double ref = svd(A).sigma(0);
    CHECK(operator_norm_power(A) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("grid rounding: idempotence, distance, half away from zero") {
  CHECK(round_to_grid(0.5, 1.0) == 1.0);
  CHECK(round_to_grid(-0.5, 1.0) == -1.0);
  CHECK(round_to_grid(1.25, 0.5) == 1.5);
  CHECK(round_to_grid(0.2, 0.5) == 0.0);
  for (std::uint64_t s = 0; s < 500; ++s) {
    RngStream rng(s);
    double eps0 = rng.uniform(0.01, 2.0);
    double x = rng.uniform(-20.0, 20.0);
    double g = round_to_grid(x, eps0);
    CHECK(std::abs(x - g) <= eps0 / 2 + 1e-12);
    CHECK(round_to_grid(g, eps0) == g);
  }
}

TEST_CASE("symmetrize produces the dilation with +-sigma spectrum") {
  Matrix A = random_matrix(5, 4, 5);
  Matrix S = symmetrize(A);
  CHECK(S.rows() == 9);
  CHECK((S - S.transpose()).norm() == 0.0);
  CHECK((S.topRightCorner(5, 4) - A).norm() == 0.0);
  CHECK(S.topLeftCorner(5, 5).norm() == 0.0);

  SvdFactors f = svd(A);
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  Vector ev = es.eigenvalues();  // ascending
  for (int i = 0; i < 4; ++i) {
    CHECK(ev(8 - i) == doctest::Approx(f.sigma(i)));
    CHECK(ev(i) == doctest::Approx(-f.sigma(i)));
  }
}

TEST_CASE("symmetrized system diagonalizes the dilation") {
  Matrix A = random_matrix(6, 5, 11);
  SvdFactors f = svd(A);
  SymmetrizedSystem sys = build_symmetrized_system(f, 3);
  CHECK(sys.lambda.size() == 6);
  CHECK(sys.W.cols() == 6);
  CHECK((sys.W.transpose() * sys.W - Matrix::Identity(6, 6)).norm() < 1e-10);
  Matrix S = symmetrize(A);
  CHECK((S * sys.W - sys.W * sys.lambda.asDiagonal().toDenseMatrix()).norm() <
        1e-8);
  for (int i = 0; i < 3; ++i) {
    CHECK(sys.lambda(i) == doctest::Approx(f.sigma(i)));
    CHECK(sys.lambda(i + 3) == doctest::Approx(-f.sigma(i)));
  }
  // Q = I - W W^T is a projector: applying twice equals applying once.
  Matrix X = random_matrix(11, 2, 13);
  CHECK((sys.apply_Q(sys.apply_Q(X)) - sys.apply_Q(X)).norm() < 1e-10);
  CHECK((sys.W.transpose() * sys.apply_Q(X)).norm() < 1e-9);
}

TEST_CASE("Weyl inequality for singular values") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Matrix A = random_matrix(8, 6, s);
    Matrix E = 0.3 * random_matrix(8, 6, s + 5000);
    Vector sa = svd(A).sigma, sb = svd(A + E).sigma;
    double eop = norm(E, NormKind::Operator);
    for (int i = 0; i < sa.size(); ++i) {
      CHECK(std::abs(sb(i) - sa(i)) <= eop + 1e-8);
    }
  }
}
