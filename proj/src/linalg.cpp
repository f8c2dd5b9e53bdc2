#include "mclab/linalg.hpp"

#include <cmath>

namespace mclab {

namespace {

void check_finite(const Matrix& A, const char* what) {
  if (!A.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
  }
}

// Largest-magnitude entry positive, lowest index wins ties.
void fix_signs(Matrix& U, Matrix& V) {
  for (int j = 0; j < U.cols(); ++j) {
    int best = 0;
    double best_abs = std::abs(U(0, j));
    for (int i = 1; i < U.rows(); ++i) {
      double a = std::abs(U(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (U(best, j) < 0) {
      U.col(j) = -U.col(j);
      if (j < V.cols()) V.col(j) = -V.col(j);
    }
  }
}

}  // namespace

SvdFactors svd(const Matrix& A) {
  check_finite(A, "svd");
  Eigen::BDCSVD<Matrix> solver(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (solver.info() != Eigen::Success) {
    throw SvdError("svd: iteration did not converge");
  }
  SvdFactors f;
  f.U = solver.matrixU();
  f.sigma = solver.singularValues();
  f.V = solver.matrixV();
  fix_signs(f.U, f.V);
  f.numerical_rank = 0;
  double s0 = f.sigma.size() > 0 ? f.sigma(0) : 0.0;
  for (int i = 0; i < f.sigma.size(); ++i) {
    if (f.sigma(i) >= kRankTol * s0 && f.sigma(i) > 0) f.numerical_rank = i + 1;
  }
  return f;
}

SvdFactors truncated_svd(const Matrix& A, int k) {
  int kmax = static_cast<int>(std::min(A.rows(), A.cols()));
  if (k < 1 || k > kmax) {
    throw std::invalid_argument("truncated_svd: k out of range");
  }
  SvdFactors f = svd(A);
  SvdFactors t;
  t.U = f.U.leftCols(k);
  t.sigma = f.sigma.head(k);
  t.V = f.V.leftCols(k);
  t.numerical_rank = std::min(f.numerical_rank, k);
  return t;
}

double norm(const Matrix& A, NormKind kind) {
  check_finite(A, "norm");
  switch (kind) {
    case NormKind::Operator: {
      if (A.rows() == 0 || A.cols() == 0) return 0.0;
      Eigen::BDCSVD<Matrix> solver(A);
      return solver.singularValues()(0);
    }
    case NormKind::Frobenius:
      return A.norm();
    case NormKind::Infinity:
      return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
    case NormKind::TwoToInfinity:
      return A.size() == 0 ? 0.0 : A.rowwise().norm().maxCoeff();
  }
  throw std::invalid_argument("norm: unknown kind");
}

double operator_norm_power(const Matrix& A, int max_iter, double tol) {
  check_finite(A, "operator_norm_power");
  if (A.size() == 0) return 0.0;
  // Deterministic start: ones vector plus a small ramp to avoid landing in
  // an invariant subspace orthogonal to the top singular vector.
  Vector v = Vector::Ones(A.cols());
  for (int i = 0; i < v.size(); ++i) v(i) += 1e-3 * (i % 7);
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = A.transpose() * (A * v);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    w /= nw;
    double next = std::sqrt(nw);
    if (std::abs(next - est) <= tol * std::max(1.0, next) && it > 2) {
      return next;
    }
    est = next;
    v = w;
  }
  return est;
}

double round_to_grid(double x, double eps0) {
  if (!(eps0 > 0)) throw std::invalid_argument("round_to_grid: eps0 <= 0");
  // std::round rounds halves away from zero, matching the tie policy.
  return std::round(x / eps0) * eps0;
}

Matrix round_matrix(const Matrix& A, double eps0) {
  if (!(eps0 > 0)) throw std::invalid_argument("round_matrix: eps0 <= 0");
  return A.unaryExpr([eps0](double x) { return round_to_grid(x, eps0); });
}

Matrix symmetrize(const Matrix& A) {
  int m = static_cast<int>(A.rows());
  int n = static_cast<int>(A.cols());
  Matrix S = Matrix::Zero(m + n, m + n);
  S.topRightCorner(m, n) = A;
  S.bottomLeftCorner(n, m) = A.transpose();
  return S;
}

SymmetrizedSystem build_symmetrized_system(const SvdFactors& f, int r) {
  if (r < 1 || r > f.sigma.size()) {
    throw std::invalid_argument("build_symmetrized_system: r out of range");
  }
  if (f.sigma(r - 1) < kRankTol * f.sigma(0)) {
    throw RankError("build_symmetrized_system: r exceeds numerical rank");
  }
  SymmetrizedSystem sys;
  sys.m = static_cast<int>(f.U.rows());
  sys.n = static_cast<int>(f.V.rows());
  sys.r = r;
  sys.lambda.resize(2 * r);
  sys.W.resize(sys.m + sys.n, 2 * r);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < r; ++i) {
    sys.lambda(i) = f.sigma(i);
    sys.lambda(i + r) = -f.sigma(i);
    sys.W.col(i).head(sys.m) = inv_sqrt2 * f.U.col(i);
    sys.W.col(i).tail(sys.n) = inv_sqrt2 * f.V.col(i);
    sys.W.col(i + r).head(sys.m) = inv_sqrt2 * f.U.col(i);
    sys.W.col(i + r).tail(sys.n) = -inv_sqrt2 * f.V.col(i);
  }
  return sys;
}

}  // namespace mclab
