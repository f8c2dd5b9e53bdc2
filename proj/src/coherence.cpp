#include "mclab/coherence.hpp"

#include <cmath>

namespace mclab {

CoherenceReport coherence(const SvdFactors& f, int r) {
  if (r < 1 || r > f.U.cols()) {
    throw std::invalid_argument("coherence: r out of range");
  }
  Matrix U = f.U.leftCols(r);
  Matrix V = f.V.leftCols(r);
  const double m = static_cast<double>(U.rows());
  const double n = static_cast<double>(V.rows());

  CoherenceReport rep;
  rep.r = r;
  rep.U_2inf = norm(U, NormKind::TwoToInfinity);
  rep.V_2inf = norm(V, NormKind::TwoToInfinity);
  rep.U_inf = norm(U, NormKind::Infinity);
  rep.V_inf = norm(V, NormKind::Infinity);
  rep.mu_U = (m / r) * rep.U_2inf * rep.U_2inf;
  rep.mu_V = (n / r) * rep.V_2inf * rep.V_2inf;
  rep.mu0 = std::max(rep.mu_U, rep.mu_V);
  rep.mu1 = std::sqrt(m * n / r) * norm(U * V.transpose(), NormKind::Infinity);
  return rep;
}

}  // namespace mclab
