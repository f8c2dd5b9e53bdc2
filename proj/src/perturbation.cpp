#include "mclab/perturbation.hpp"

#include <algorithm>
#include <cmath>

namespace mclab {

namespace {

void validate_S(const std::vector<int>& S, int r) {
  if (S.empty()) throw std::invalid_argument("S must be nonempty");
  for (int i : S) {
    if (i < 0 || i >= r) throw std::invalid_argument("S index out of range");
  }
}

bool is_prefix_set(std::vector<int> S) {
  std::sort(S.begin(), S.end());
  for (int k = 0; k < static_cast<int>(S.size()); ++k) {
    if (S[k] != k) return false;
  }
  return true;
}

// max over a in [0, a_cap] of the normalized row norms
//   ||(EE^T)^a U||_{2,inf} / H^{2a}  and  ||(EE^T)^a E V||_{2,inf} / H^{2a+1},
// divided by sqrt(r). Degenerates to the a = 0 value when E = 0.
double tau_det_side(const Matrix& U, const Matrix& V, const Matrix& E,
                    double H, int a_cap) {
  const double sqrt_r = std::sqrt(static_cast<double>(U.cols()));
  if (H <= 0.0) return norm(U, NormKind::TwoToInfinity) / sqrt_r;
  Matrix even = U;                 // (EE^T)^a U / H^{2a}
  Matrix odd = (E * V) / H;        // (EE^T)^a E V / H^{2a+1}
  double best = 0.0;
  for (int a = 0; a <= a_cap; ++a) {
    best = std::max(best, norm(even, NormKind::TwoToInfinity));
    best = std::max(best, norm(odd, NormKind::TwoToInfinity));
    if (a < a_cap) {
      even = E * (E.transpose() * even) / (H * H);
      odd = E * (E.transpose() * odd) / (H * H);
    }
  }
  return best / sqrt_r;
}

}  // namespace

RandomDkQuantities random_dk_quantities(const GroundTruth& gt, double varsigma,
                                        double M_param,
                                        const std::vector<int>& S) {
  validate_S(S, gt.r);
  if (!(varsigma > 0) || M_param < 0) {
    throw std::invalid_argument("random_dk_quantities: parameters must be positive");
  }
  const double N = static_cast<double>(gt.m() + gt.n());
  const double logN = std::log(N);
  const double r = static_cast<double>(gt.r);
  const Matrix U = gt.factors.U.leftCols(gt.r);
  const Matrix V = gt.factors.V.leftCols(gt.r);
  const double U_2inf = norm(U, NormKind::TwoToInfinity);
  const double V_2inf = norm(V, NormKind::TwoToInfinity);

  RandomDkQuantities q;
  q.tau1_rand = U_2inf * logN / std::sqrt(r) +
                M_param * V_2inf * std::pow(logN, 3) / std::sqrt(r * N) +
                std::pow(logN, 1.5) / std::sqrt(N);
  q.tau2_rand = V_2inf * logN / std::sqrt(r) +
                M_param * U_2inf * std::pow(logN, 3) / std::sqrt(r * N) +
                std::pow(logN, 1.5) / std::sqrt(N);
  const double sigma_S = gt.sigma_S(S);
  const double Delta_S = gt.Delta_S(S);
  const double bilinear = std::sqrt(logN) + M_param * norm(U, NormKind::Infinity) *
                                                norm(V, NormKind::Infinity) * logN;
  q.R_S = varsigma * std::sqrt(N) / sigma_S + r * varsigma * bilinear / Delta_S +
          2.0 * r * varsigma * varsigma * N / (Delta_S * sigma_S);
  return q;
}

PerturbationReport perturbation_report(const GroundTruth& gt, const Matrix& E,
                                       const std::vector<int>& S,
                                       double varsigma, double M_param) {
  validate_S(S, gt.r);
  const int r = gt.r;
  PerturbationReport rep;
  rep.sigma_S = gt.sigma_S(S);
  rep.Delta_S = gt.Delta_S(S);
  if (rep.sigma_S <= 0 || rep.Delta_S <= kRankTol * gt.factors.sigma(0)) {
    throw DegenerateSpectrumError("perturbation_report: sigma_S or Delta_S vanishes");
  }

  const Matrix U = gt.factors.U.leftCols(r);
  const Matrix V = gt.factors.V.leftCols(r);
  rep.E_op = operator_norm_power(E);
  rep.UEV_inf = norm(U.transpose() * E * V, NormKind::Infinity);

  const Matrix G = (E.transpose() * U).transpose() * (E.transpose() * U);
  const Matrix Hm = (E * V).transpose() * (E * V);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      if (i == j) continue;
      rep.y = std::max(rep.y, 0.5 * (std::abs(G(i, j)) + std::abs(Hm(i, j))));
    }
  }

  // Cross matrices of the Hermitian dilation, built from the thin factors:
  // W^T sym(E) W = T + T^T with T = Wtop^T E Wbot, and
  // W^T sym(E)^2 W = (E^T Wtop)^T (E^T Wtop) + (E Wbot)^T (E Wbot).
  SymmetrizedSystem sys = build_symmetrized_system(gt.factors, r);
  const Matrix Wtop = sys.W.topRows(gt.m());
  const Matrix Wbot = sys.W.bottomRows(gt.n());
  const Matrix T = Wtop.transpose() * E * Wbot;
  const Matrix X = T + T.transpose();
  const Matrix Et_top = E.transpose() * Wtop;
  const Matrix E_bot = E * Wbot;
  const Matrix B2 = Et_top.transpose() * Et_top + E_bot.transpose() * E_bot;

  rep.R1 = std::max(rep.E_op / rep.sigma_S,
                    2.0 * r * norm(X, NormKind::Infinity) / rep.Delta_S);
  rep.R2 = std::sqrt(2.0 * r) * rep.E_op / std::sqrt(rep.sigma_S * rep.Delta_S);
  double cross = 0.0;
  for (int i = 0; i < 2 * r; ++i) {
    for (int j = 0; j < 2 * r; ++j) {
      int d = std::abs(i - j);
      if (d == 0 || d == r) continue;
      cross = std::max(cross, std::abs(B2(i, j)));
    }
  }
  rep.R3 = 2.0 * r * cross / (rep.sigma_S * rep.Delta_S);
  rep.hypothesis_ok = std::max(rep.R1, rep.R2) <= 0.125 + 1e-12;

  const int a_cap =
      static_cast<int>(std::floor(10.0 * std::log(static_cast<double>(gt.m() + gt.n()))));
  rep.tau1_det = tau_det_side(U, V, E, rep.E_op, a_cap);
  rep.tau2_det = tau_det_side(V, U, E.transpose(), rep.E_op, a_cap);

  if (varsigma > 0) {
    RandomDkQuantities q = random_dk_quantities(gt, varsigma, M_param, S);
    rep.tau1_rand = q.tau1_rand;
    rep.tau2_rand = q.tau2_rand;
    rep.R_S = q.R_S;
  }
  return rep;
}

SubspaceDiff subspace_diff(const GroundTruth& gt, const Matrix& E,
                           const std::vector<int>& S) {
  validate_S(S, gt.r);
  SubspaceDiff diff;
  diff.S = S;

  SvdFactors ft = svd(gt.A + E);
  // Pairing is by index after the descending sort; demand a nonzero gap
  // between the selected perturbed values and the rest.
  double top = ft.sigma(0);
  for (int i : S) {
    for (int j = 0; j < ft.sigma.size(); ++j) {
      if (std::find(S.begin(), S.end(), j) != S.end()) continue;
      if (std::abs(ft.sigma(i) - ft.sigma(j)) < kRankTol * std::max(top, 1.0)) {
        throw DegenerateSpectrumError("subspace_diff: perturbed spectrum has no gap at S");
      }
    }
  }

  const int n = gt.n();
  Matrix Vs = Matrix::Zero(n, static_cast<int>(S.size()));
  Matrix Vts = Matrix::Zero(n, static_cast<int>(S.size()));
  for (int k = 0; k < static_cast<int>(S.size()); ++k) {
    Vs.col(k) = gt.factors.V.col(S[k]);
    Vts.col(k) = ft.V.col(S[k]);
  }
  diff.proj_diff_V = Vts * Vts.transpose() - Vs * Vs.transpose();
  diff.op_norm = norm(diff.proj_diff_V, NormKind::Operator);
  diff.inf_norm = norm(diff.proj_diff_V, NormKind::Infinity);
  diff.two_inf_norm = norm(diff.proj_diff_V, NormKind::TwoToInfinity);
  diff.well_separated = gt.Delta_S(S) > 2.0 * operator_norm_power(E);

  diff.is_prefix = is_prefix_set(S);
  if (diff.is_prefix) {
    const int s = static_cast<int>(S.size());
    Matrix A_s = gt.factors.U.leftCols(s) * gt.factors.sigma.head(s).asDiagonal() *
                 gt.factors.V.leftCols(s).transpose();
    Matrix At_s = ft.U.leftCols(s) * ft.sigma.head(s).asDiagonal() *
                  ft.V.leftCols(s).transpose();
    diff.approx_diff = At_s - A_s;
    diff.approx_inf = norm(diff.approx_diff, NormKind::Infinity);
  }
  return diff;
}

DkMatcomBound dk_matcom_bound(const GroundTruth& gt, double p, double K,
                              double mu0, int s) {
  if (s < 1 || s > gt.r) throw std::invalid_argument("dk_matcom_bound: s out of range");
  const double delta_s = gt.delta[s - 1];
  if (!(delta_s > 0)) throw std::invalid_argument("dk_matcom_bound: delta_s = 0");
  const double m = gt.m(), n = gt.n();
  const double N = m + n;
  const double logN = std::log(N);
  const double r = gt.r;
  const double sigma_s = gt.factors.sigma(s - 1);

  DkMatcomBound out;
  const double paren = (K / sigma_s) * std::sqrt(N / p) +
                       r * K * std::sqrt(logN) / (delta_s * std::sqrt(p)) +
                       r * r * mu0 * K * logN / (p * delta_s * std::sqrt(m * n));
  out.value = (logN + mu0) * logN * logN / std::sqrt(m * n) * r * sigma_s * paren;
  out.gap_ok = delta_s >= 40.0 * r * K * std::sqrt(N / p);
  out.density_ok = p >= (1.0 / m + 1.0 / n) * logN;
  return out;
}

DeterministicDkBounds deterministic_dk_bounds(const PerturbationReport& report,
                                              const GroundTruth& gt,
                                              const std::vector<int>& S) {
  validate_S(S, gt.r);
  const double r = gt.r;
  const double base =
      r * (report.E_op / report.sigma_S + 2.0 * r * report.UEV_inf / report.Delta_S +
           2.0 * r * report.y / (report.Delta_S * report.sigma_S));
  DeterministicDkBounds out;
  out.entry_bound = report.tau1_det * report.tau1_det * base;
  out.row_bound = report.tau1_det * base;
  out.approx_bound = report.tau1_det * report.tau2_det * report.sigma_S * base;
  out.hypothesis_ok = report.hypothesis_ok;
  return out;
}

SeriesCheck resolvent_series_check(const GroundTruth& gt, const Matrix& E,
                                   const std::vector<int>& S, int nu,
                                   int gamma_max, const ContourSpec& contour) {
  validate_S(S, gt.r);
  if (nu != 0 && nu != 1) throw std::invalid_argument("resolvent_series_check: nu must be 0 or 1");
  if (nu == 1 && !is_prefix_set(S)) {
    throw std::invalid_argument("resolvent_series_check: nu = 1 needs a prefix S");
  }
  const int r = gt.r;
  SeriesCheck check;
  check.contour = contour;
  check.gamma_max = gamma_max;

  PerturbationReport rep = perturbation_report(gt, E, S);
  check.hypothesis_ok = rep.hypothesis_ok;

  SymmetrizedSystem sys = build_symmetrized_system(gt.factors, r);
  SvdFactors ft = svd(gt.A + E);
  SymmetrizedSystem sys_t = build_symmetrized_system(ft, r);

  // Selected columns: index i for +sigma_i and i + r for -sigma_i.
  std::vector<int> cols;
  for (int i : S) cols.push_back(i);
  for (int i : S) cols.push_back(i + r);

  Matrix exact;
  if (nu == 0) {
    auto projector = [&](const SymmetrizedSystem& s) {
      Matrix Wsel(s.dim(), static_cast<int>(cols.size()));
      for (int k = 0; k < static_cast<int>(cols.size()); ++k) {
        Wsel.col(k) = s.W.col(cols[k]);
      }
      return Matrix(Wsel * Wsel.transpose());
    };
    exact = projector(sys_t) - projector(sys);
  } else {
    Matrix A_S = Matrix::Zero(gt.m(), gt.n());
    Matrix At_S = Matrix::Zero(gt.m(), gt.n());
    for (int i : S) {
      A_S += gt.factors.sigma(i) * gt.factors.U.col(i) * gt.factors.V.col(i).transpose();
      At_S += ft.sigma(i) * ft.U.col(i) * ft.V.col(i).transpose();
    }
    exact = symmetrize(At_S - A_S);
  }
  check.exact_norm = exact.norm();

  std::vector<Matrix> terms = resolvent_series_terms(sys, E, nu, gamma_max, contour);
  ContourSpec doubled = contour;
  doubled.node_count *= 2;
  std::vector<Matrix> terms2 = resolvent_series_terms(sys, E, nu, gamma_max, doubled);
  Matrix sum1 = Matrix::Zero(sys.dim(), sys.dim());
  Matrix sum2 = sum1;
  for (int g = 0; g < gamma_max; ++g) {
    sum1 += terms[g];
    sum2 += terms2[g];
  }
  if ((sum1 - sum2).norm() > 1e-9 * std::max(1.0, sum2.norm())) {
    throw ContourError("resolvent_series_check: node doubling did not stabilize");
  }

  Matrix partial = Matrix::Zero(sys.dim(), sys.dim());
  for (int g = 0; g < gamma_max; ++g) {
    partial += terms2[g];
    double tn = terms2[g].norm();
    check.term_norms.push_back(tn);
    check.partial_sum_errors.push_back((partial - exact).norm());
    if (g > 0 && check.term_norms[g - 1] > 0) {
      check.decay_ratios.push_back(tn / check.term_norms[g - 1]);
    }
  }
  return check;
}

SemiIsoResult semi_isotropic_check(int m, int n, double M_param, int a_max,
                                   int p_moment, std::int64_t trials,
                                   std::uint64_t seed, bool enforce_hypothesis) {
  if (M_param < 1.0) {
    throw std::invalid_argument("semi_isotropic_check: M must be >= 1");
  }
  if (a_max < 0 || p_moment < 1 || trials < 1) {
    throw std::invalid_argument("semi_isotropic_check: counts must be positive");
  }
  constexpr int r = 3;  // subspace width of the sampled orthonormal frames

  SemiIsoResult res;
  res.a_max = a_max;
  res.p_moment = p_moment;
  res.M_param = M_param;
  res.trials = trials;
  res.odd_failures.assign(a_max + 1, 0);
  res.even_failures.assign(a_max + 1, 0);
  const double dim = static_cast<double>(m + n);
  const double p = static_cast<double>(p_moment);
  for (int a = 0; a <= a_max; ++a) {
    double odd_req = 256.0 * M_param * M_param * std::pow(p, 6) * std::pow(2.0 * a + 1, 4);
    double even_req = 256.0 * M_param * M_param * std::pow(p, 6) * std::pow(2.0 * a, 4);
    res.odd_hypothesis.push_back(dim >= odd_req);
    res.even_hypothesis.push_back(dim >= even_req);
    if (enforce_hypothesis && (dim < odd_req || dim < even_req)) {
      throw std::invalid_argument(
          "semi_isotropic_check: dimension hypothesis m+n >= 2^8 M^2 p^6 (2a+1)^4 "
          "fails for a = " + std::to_string(a) + "; refusing a vacuous run");
    }
  }
  res.odd_tail = std::pow(32.0 / res.D_odd, 2.0 * p);
  res.even_tail = std::pow(16.0 / res.D_even, 2.0 * p);

  for (std::int64_t t = 0; t < trials; ++t) {
    RngStream rng = RngStream::child(seed, 7, static_cast<std::uint64_t>(t));

    // Unit-variance noise with E|X|^l <= M^{l-2}: Rademacher when M = 1,
    // otherwise +-M carried by a Bernoulli(1/M^2) mask.
    Matrix E(m, n);
    const double hit = 1.0 / (M_param * M_param);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        if (M_param == 1.0) {
          E(i, j) = rng.rademacher();
        } else {
          E(i, j) = rng.bernoulli(hit) ? M_param * rng.rademacher() : 0.0;
        }
      }
    }
    auto orthonormal = [&](int rows) {
      Matrix G(rows, r);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < r; ++j) G(i, j) = rng.gaussian();
      }
      Eigen::HouseholderQR<Matrix> qr(G);
      return Matrix(qr.householderQ() * Matrix::Identity(rows, r));
    };
    Matrix U = orthonormal(m);
    Matrix V = orthonormal(n);
    const double U_2inf = norm(U, NormKind::TwoToInfinity);
    const double V_2inf = norm(V, NormKind::TwoToInfinity);
    const int k = static_cast<int>(rng.uniform_int(0, n - 1));

    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    row(k) = 1.0;  // e_k^T (E^T E)^a, advanced incrementally
    for (int a = 0; a <= a_max; ++a) {
      const double growth = std::pow(2.0 * dim, a);
      double even_lhs = (row * V).norm();
      double even_rhs = res.D_even * p * V_2inf * growth;
      if (even_lhs > even_rhs) ++res.even_failures[a];

      Eigen::RowVectorXd rowE = row * E.transpose();
      double odd_lhs = (rowE * U).norm();
      double odd_rhs = res.D_odd * std::sqrt(static_cast<double>(r)) *
                       std::pow(p, 1.5) * std::sqrt(2.0 * a + 1) *
                       (16.0 * std::pow(p, 1.5) * std::pow(2.0 * a + 1, 1.5) *
                            M_param * U_2inf / std::sqrt(static_cast<double>(r)) +
                        1.0) *
                       growth;
      if (odd_lhs > odd_rhs) ++res.odd_failures[a];

      row = rowE * E;
    }
  }
  return res;
}

BasicEBoundsResult basic_E_bounds_check(const GroundTruth& gt, double p,
                                        const NoiseSpec& noise,
                                        std::int64_t trials,
                                        std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("basic_E_bounds_check: trials < 1");
  const int r = gt.r;
  const Matrix U = gt.factors.U.leftCols(r);
  const Matrix V = gt.factors.V.leftCols(r);
  const double K = gt.K_A + (noise.law == NoiseLaw::Zero ? 0.0 : noise.K_Z);
  const double varsigma = K / std::sqrt(p);
  const double M_param = 1.0 / std::sqrt(p);
  const double N = static_cast<double>(gt.m() + gt.n());
  const double logN = std::log(N);
  const double bilinear_rhs =
      2.0 * varsigma * (std::sqrt(logN) + M_param * norm(U, NormKind::Infinity) *
                                              norm(V, NormKind::Infinity) * logN);

  std::int64_t ok_op = 0, ok_cross = 0, ok_bilinear = 0;
  for (std::int64_t t = 0; t < trials; ++t) {
    RngStream mask_rng = RngStream::child(seed, 11, static_cast<std::uint64_t>(t));
    SampleMask mask = sample_mask(gt.m(), gt.n(), p, mask_rng.engine()());
    RngStream noise_rng = RngStream::child(seed, 13, static_cast<std::uint64_t>(t));
    Matrix Z = gen_noise(gt.m(), gt.n(), noise, noise_rng.engine()());
    Observation obs = observe(gt, mask, Z);

    const double E_op = operator_norm_power(obs.E);
    if (E_op <= 1.9 * varsigma * std::sqrt(N)) ++ok_op;

    const Matrix G = (obs.E.transpose() * U).transpose() * (obs.E.transpose() * U);
    const Matrix Hm = (obs.E * V).transpose() * (obs.E * V);
    double cross = 0.0;
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        if (i != j) cross = std::max(cross, std::abs(G(i, j)) + std::abs(Hm(i, j)));
      }
    }
    if (cross <= 2.0 * E_op * E_op) ++ok_cross;

    if (norm(U.transpose() * obs.E * V, NormKind::Infinity) <= bilinear_rhs) {
      ++ok_bilinear;
    }
  }
  BasicEBoundsResult out;
  out.trials = trials;
  out.freq_op = static_cast<double>(ok_op) / trials;
  out.freq_cross = static_cast<double>(ok_cross) / trials;
  out.freq_bilinear = static_cast<double>(ok_bilinear) / trials;
  return out;
}

}  // namespace mclab
