#pragma once

#include "mclab/linalg.hpp"

namespace mclab {

/// Incoherence diagnostics of the leading-r singular subspaces.
struct CoherenceReport {
  double mu_U = 0.0;  // (m/r) max_i ||e_i^T U||^2
  double mu_V = 0.0;
  double mu0 = 0.0;   // max(mu_U, mu_V)
  double mu1 = 0.0;   // sqrt(mn/r) ||U V^T||_inf
  int r = 0;
  double U_inf = 0.0, V_inf = 0.0;
  double U_2inf = 0.0, V_2inf = 0.0;
};

CoherenceReport coherence(const SvdFactors& f, int r);

}  // namespace mclab
