#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace mclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative threshold below which a singular value counts as numerically zero.
inline constexpr double kRankTol = 1e-10;

struct SvdError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// SVD factors A = U * diag(sigma) * V^T with k = min(m, n) columns.
///
/// Sign convention: in each column of U the entry of largest magnitude is
/// positive (lowest index wins ties); the matching column of V is flipped
/// together with it, so the product is unchanged. This makes the
/// factorization a deterministic function of the input bits.
struct SvdFactors {
  Matrix U;      // m x k, orthonormal columns
  Vector sigma;  // descending, nonnegative
  Matrix V;      // n x k, orthonormal columns

  // Number of singular values >= kRankTol * sigma(0). Columns past this
  // index span an arbitrary orthonormal completion.
  int numerical_rank = 0;

  Matrix reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }
};

enum class NormKind { Operator, Frobenius, Infinity, TwoToInfinity };

SvdFactors svd(const Matrix& A);
SvdFactors truncated_svd(const Matrix& A, int k);

double norm(const Matrix& A, NormKind kind);

/// Operator norm via power iteration on A^T A. Deterministic start vector.
/// Cheaper than a full SVD for large matrices; used where only ||A|| is
/// needed. Agrees with norm(A, Operator) to ~1e-10 relative.
double operator_norm_power(const Matrix& A, int max_iter = 200,
                           double tol = 1e-12);

/// Nearest multiple of eps0; exact halves round away from zero.
double round_to_grid(double x, double eps0);
Matrix round_matrix(const Matrix& A, double eps0);

/// Hermitian dilation [[0, A], [A^T, 0]].
Matrix symmetrize(const Matrix& A);

/// Eigen-system of the dilation sym(A) restricted to the 2r nonzero
/// eigenvalues: lambda_i = sigma_i and lambda_{i+r} = -sigma_i, with
/// eigenvectors w_i = (u_i, v_i)/sqrt(2) and (u_i, -v_i)/sqrt(2).
struct SymmetrizedSystem {
  int m = 0, n = 0, r = 0;
  Vector lambda;  // length 2r
  Matrix W;       // (m+n) x 2r, orthonormal columns

  int dim() const { return m + n; }
  // Projector complement Q = I - W W^T applied to X.
  Matrix apply_Q(const Matrix& X) const { return X - W * (W.transpose() * X); }
};

SymmetrizedSystem build_symmetrized_system(const SvdFactors& f, int r);

}  // namespace mclab
