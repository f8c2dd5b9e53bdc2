#include "mclab/contour.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "mclab/rng.hpp"

namespace mclab {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

Rational rpow(const Rational& x, int e) {
  Rational out = 1;
  Rational base = e >= 0 ? x : Rational(1) / x;
  int k = e >= 0 ? e : -e;
  for (int i = 0; i < k; ++i) out *= base;
  return out;
}

Rational rfactorial(int k) {
  Rational out = 1;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

bool index_in_S(int i, int r, const std::vector<bool>& in_S) {
  return in_S[i < r ? i : i - r];
}

// Trapezoidal rule on one circle for the scalar integrand; exact for the
// (1/2*pi*i)-normalized contour integral up to spectral accuracy.
Complex circle_quadrature(const Circle& c, int nodes, int nu, int gamma,
                          const std::vector<double>& poles) {
  Complex acc = 0.0;
  for (int j = 0; j < nodes; ++j) {
    double theta = 2.0 * M_PI * j / nodes;
    Complex dz_over_n(c.radius * std::cos(theta), c.radius * std::sin(theta));
    Complex z = Complex(c.center, 0.0) + dz_over_n;
    Complex f = std::pow(z, nu - gamma - 1);
    for (double lam : poles) f *= lam / (z - lam);
    acc += f * dz_over_n;
  }
  return acc / static_cast<double>(nodes);
}

}  // namespace

ContourSpec build_contour(const Vector& sigma, const Vector& sigma_tilde,
                          const std::vector<int>& S, int r, double delta_S,
                          int node_count) {
  if (S.empty()) throw std::invalid_argument("build_contour: empty S");
  if (!(delta_S > 0)) throw DegeneracyError("build_contour: delta_S <= 0");
  std::vector<bool> in_S(r, false);
  for (int i : S) {
    if (i < 0 || i >= r) throw std::invalid_argument("build_contour: S index out of range");
    in_S[i] = true;
  }

  std::vector<double> inside, outside;
  outside.push_back(0.0);
  auto split = [&](const Vector& vals) {
    for (int i = 0; i < vals.size(); ++i) {
      (i < r && in_S[i] ? inside : outside).push_back(vals(i));
      outside.push_back(-vals(i));  // mirrored by the negative circle
    }
  };
  split(sigma);
  if (sigma_tilde.size() > 0) split(sigma_tilde);
  // The mirror of every included value is included in the negative circle.
  std::vector<double> inside_neg;
  for (double v : inside) {
    inside_neg.push_back(-v);
    outside.erase(std::find(outside.begin(), outside.end(), -v));
  }

  auto [lo_it, hi_it] = std::minmax_element(inside.begin(), inside.end());
  ContourSpec spec;
  spec.node_count = node_count;
  spec.positive.center = (*lo_it + *hi_it) / 2.0;
  spec.positive.radius = (*hi_it - *lo_it) / 2.0 + delta_S / 2.0;
  spec.negative.center = -spec.positive.center;
  spec.negative.radius = spec.positive.radius;

  const double clearance = delta_S / 4.0;
  auto dist = [&](const Circle& c, double v) {
    return std::abs(v - c.center) - c.radius;
  };
  for (double v : inside) {
    if (-dist(spec.positive, v) < clearance) {
      throw ContourError("build_contour: included eigenvalue too close to the contour");
    }
  }
  for (double v : outside) {
    if (dist(spec.positive, v) < clearance || dist(spec.negative, v) < clearance) {
      throw ContourError("build_contour: excluded eigenvalue too close to the contour");
    }
  }
  return spec;
}

double integral_coefficient_residue(const std::vector<int>& I,
                                    const Vector& lambda,
                                    const std::vector<int>& S, int nu,
                                    int gamma) {
  if (I.empty()) throw std::invalid_argument("integral_coefficient_residue: empty I");
  const int beta = static_cast<int>(I.size());
  if (gamma + 1 < beta) {
    throw std::invalid_argument("integral_coefficient_residue: gamma + 1 < |I|");
  }
  const int r = static_cast<int>(lambda.size()) / 2;
  std::vector<bool> in_S(r, false);
  for (int i : S) in_S[i] = true;

  // Exact poles: the rationals represented by the input doubles.
  std::map<Rational, int> enclosed, excluded;
  Rational c = 1;
  for (int idx : I) {
    if (idx < 0 || idx >= 2 * r) {
      throw std::invalid_argument("integral_coefficient_residue: index out of range");
    }
    Rational lam(lambda(idx));
    c *= lam;
    (index_in_S(idx, r, in_S) ? enclosed : excluded)[lam] += 1;
  }
  if (enclosed.empty()) return 0.0;
  if (c == 0) throw DegeneracyError("integral_coefficient_residue: zero eigenvalue in I");

  const int s0 = gamma + 1 - nu;  // order of the excluded pole at 0
  for (const auto& [a, q] : enclosed) {
    if (a == 0 || excluded.count(a)) {
      throw DegeneracyError(
          "integral_coefficient_residue: enclosed pole collides with an excluded one");
    }
  }

  Rational total = 0;
  for (const auto& [a, q] : enclosed) {
    // Residue at a of order q: (q-1)-th derivative of the deflated function
    //   g(z) = c z^{-s0} prod_{b != a} (z - b)^{-q_b}
    // at z = a, via the log-derivative recurrence g^{(k+1)} = sum binom(k,j) h^{(j)} g^{(k-j)}.
    Rational g0 = c * rpow(a, -s0);
    std::vector<std::pair<Rational, int>> others;
    for (const auto& [b, qb] : enclosed) {
      if (b != a) others.emplace_back(b, qb);
    }
    for (const auto& [b, qb] : excluded) others.emplace_back(b, qb);
    for (const auto& [b, qb] : others) g0 *= rpow(a - b, -qb);

    std::vector<Rational> G{g0}, H;
    Rational jfact = 1;
    for (int j = 0; j < q - 1; ++j) {
      if (j > 0) jfact *= j;
      Rational sign = (j % 2 == 0) ? 1 : -1;
      Rational h = -Rational(s0) * sign * jfact * rpow(a, -(j + 1));
      for (const auto& [b, qb] : others) {
        h -= Rational(qb) * sign * jfact * rpow(a - b, -(j + 1));
      }
      H.push_back(h);
    }
    for (int k = 0; k + 1 < q; ++k) {
      Rational next = 0, binom = 1;
      for (int j = 0; j <= k; ++j) {
        if (j > 0) binom = binom * (k - j + 1) / j;
        next += binom * H[j] * G[k - j];
      }
      G.push_back(next);
    }
    total += G[q - 1] / rfactorial(q - 1);
  }
  return static_cast<double>(total);
}

double integral_coefficient_quadrature(const std::vector<int>& I,
                                       const Vector& lambda,
                                       const std::vector<int>& S, int nu,
                                       int gamma, const ContourSpec& contour) {
  std::vector<double> poles;
  for (int idx : I) poles.push_back(lambda(idx));

  auto evaluate = [&](int nodes) {
    return circle_quadrature(contour.positive, nodes, nu, gamma, poles) +
           circle_quadrature(contour.negative, nodes, nu, gamma, poles);
  };
  int nodes = contour.node_count;
  Complex prev = evaluate(nodes);
  for (;;) {
    nodes *= 2;
    Complex cur = evaluate(nodes);
    if (std::abs(cur - prev) <= 1e-9 * std::max(1.0, std::abs(cur))) {
      if (std::abs(cur.imag()) > 1e-9) {
        throw ContourError("integral_coefficient_quadrature: non-real result");
      }
      return cur.real();
    }
    if (nodes > (1 << 20)) {
      throw ContourError("integral_coefficient_quadrature: node doubling did not stabilize");
    }
    prev = cur;
  }
}

std::vector<AlphaBeta> enumerate_partitions(int gamma, int h) {
  std::vector<AlphaBeta> out;
  if (h < 1 || h > gamma / 2 + 1) return out;
  const int total = gamma + 1;

  std::vector<int> beta(h), alpha(h + 1);
  // Compositions of B into h parts >= 1, then of total - B into h + 1 parts
  // with the interior parts >= 1.
  auto fill_alpha = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == h) {
      alpha[h] = remaining;
      out.push_back({alpha, beta});
      return;
    }
    int lo = (pos == 0) ? 0 : 1;
    int needed = h - 1 - pos;  // interior slots still to fill, each >= 1
    for (int v = lo; remaining - v >= needed; ++v) {
      alpha[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  auto fill_beta = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == h) {
      if (remaining < h - 1) return;  // interior alphas need >= 1 each
      fill_alpha(fill_alpha, 0, remaining);
      return;
    }
    for (int v = 1; remaining - v >= h - 1 - pos; ++v) {
      beta[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  fill_beta(fill_beta, 0, total);
  return out;
}

namespace {
std::int64_t binom64(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  std::int64_t out = 1;
  for (std::int64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}
}  // namespace

std::int64_t partition_count(int gamma, int h) {
  if (h < 1 || h > gamma / 2 + 1) return 0;
  std::int64_t total = 0;
  for (int beta = h; beta <= gamma + 2 - h; ++beta) {
    total += binom64(beta - 1, h - 1) * binom64(gamma + 2 - beta, h);
  }
  return total;
}

CoefficientBoundTable verify_coefficient_bounds(int samples, int gamma_max,
                                                int r, std::uint64_t seed) {
  CoefficientBoundTable table;
  for (int t = 0; t < samples; ++t) {
    RngStream rng = RngStream::child(seed, 0, static_cast<std::uint64_t>(t));

    // Distinct singular values on the exact 1/8 grid, descending.
    std::vector<int> grid_picks;
    while (static_cast<int>(grid_picks.size()) < r) {
      int g = static_cast<int>(rng.uniform_int(1, 160));
      if (std::find(grid_picks.begin(), grid_picks.end(), g) == grid_picks.end()) {
        grid_picks.push_back(g);
      }
    }
    std::sort(grid_picks.rbegin(), grid_picks.rend());
    Vector sigma(r), lambda(2 * r);
    for (int i = 0; i < r; ++i) {
      sigma(i) = grid_picks[i] / 8.0;
      lambda(i) = sigma(i);
      lambda(i + r) = -sigma(i);
    }

    CoefficientBoundSample sample;
    sample.nu = static_cast<int>(rng.uniform_int(0, 1));
    // Contiguous runs keep the contour geometry valid; nu = 1 needs a prefix.
    int lo = sample.nu == 1 ? 0 : static_cast<int>(rng.uniform_int(0, r - 1));
    int hi = static_cast<int>(rng.uniform_int(lo, r - 1));
    for (int i = lo; i <= hi; ++i) sample.S.push_back(i);

    sample.gamma = static_cast<int>(rng.uniform_int(1, gamma_max));
    int beta = static_cast<int>(rng.uniform_int(1, std::min(sample.gamma + 1, 4)));
    for (int k = 0; k < beta; ++k) {
      sample.I.push_back(static_cast<int>(rng.uniform_int(0, 2 * r - 1)));
    }

    double lambda_S = sigma(sample.S.front());
    for (int i : sample.S) lambda_S = std::min(lambda_S, sigma(i));
    double Delta_S = lambda_S;  // sigma_{r+1} = 0 counts as outside S
    for (int i : sample.S) {
      for (int j = 0; j < r; ++j) {
        if (j >= lo && j <= hi) continue;
        Delta_S = std::min(Delta_S, std::abs(sigma(i) - sigma(j)));
      }
    }

    int beta_S = 0;
    for (int idx : sample.I) {
      int base = idx < r ? idx : idx - r;
      if (base >= lo && base <= hi) ++beta_S;
    }
    int beta_Sc = beta - beta_S;

    sample.value =
        integral_coefficient_residue(sample.I, lambda, sample.S, sample.nu, sample.gamma);

    double L = sample.nu == 0 ? 2.0 : lambda_S;
    sample.bound = L * std::pow(1.0 + Delta_S / lambda_S, beta_Sc) *
                   static_cast<double>(binom64(sample.gamma + beta_S - 2, beta_S - 1)) /
                   (std::pow(lambda_S, sample.gamma + 1 - beta) *
                    std::pow(Delta_S, beta - 1));
    sample.pass = std::abs(sample.value) <= sample.bound * (1.0 + 1e-9) + 1e-12;
    if (!sample.pass) ++table.violations;

    ContourSpec contour = build_contour(sigma, Vector(), sample.S, r, Delta_S);
    double quad = integral_coefficient_quadrature(sample.I, lambda, sample.S,
                                                  sample.nu, sample.gamma, contour);
    double gap = std::abs(sample.value - quad) /
                 std::max({1.0, std::abs(sample.value), std::abs(quad)});
    table.max_quadrature_gap = std::max(table.max_quadrature_gap, gap);

    table.samples.push_back(std::move(sample));
  }
  return table;
}

std::vector<Matrix> resolvent_series_terms(const SymmetrizedSystem& sys,
                                           const Matrix& E, int nu,
                                           int gamma_max,
                                           const ContourSpec& contour) {
  using CMatrix = Eigen::MatrixXcd;
  const int d = sys.dim();
  const Matrix symE = symmetrize(E);
  const int k = static_cast<int>(sys.lambda.size());

  std::vector<CMatrix> acc(gamma_max, CMatrix::Zero(d, d));
  const CMatrix Wc = sys.W.cast<Complex>();
  const CMatrix WcT = Wc.transpose();
  auto add_circle = [&](const Circle& c) {
    const int nodes = contour.node_count;
    for (int j = 0; j < nodes; ++j) {
      double theta = 2.0 * M_PI * j / nodes;
      Complex dz_over_n(c.radius * std::cos(theta), c.radius * std::sin(theta));
      Complex z = Complex(c.center, 0.0) + dz_over_n;
      Eigen::VectorXcd diag(k);
      for (int i = 0; i < k; ++i) diag(i) = 1.0 / (z - sys.lambda(i)) - 1.0 / z;
      // R(z) = I/z + W diag W^T, a rank-2r correction of a scalar matrix.
      auto apply_R = [&](const CMatrix& X) -> CMatrix {
        return X / z + Wc * (diag.asDiagonal() * (WcT * X));
      };
      CMatrix cur = apply_R(CMatrix::Identity(d, d));
      Complex weight = dz_over_n / static_cast<double>(nodes) *
                       (nu == 0 ? Complex(1.0, 0.0) : z);
      for (int g = 0; g < gamma_max; ++g) {
        CMatrix EY(d, d);
        EY.real() = symE * cur.real();
        EY.imag() = symE * cur.imag();
        cur = apply_R(EY);
        acc[g] += weight * cur;
      }
    }
  };
  add_circle(contour.positive);
  add_circle(contour.negative);

  std::vector<Matrix> terms;
  for (int g = 0; g < gamma_max; ++g) {
    double scale = std::max(1.0, acc[g].real().cwiseAbs().maxCoeff());
    if (acc[g].imag().cwiseAbs().maxCoeff() > 1e-7 * scale) {
      throw ContourError("resolvent_series_terms: non-real series term");
    }
    terms.push_back(acc[g].real());
  }
  return terms;
}

double expansion_consistency_check(const SymmetrizedSystem& sys,
                                   const Matrix& E, const std::vector<int>& S,
                                   int nu, int gamma,
                                   const ContourSpec& contour) {
  const int d = sys.dim();
  const int two_r = static_cast<int>(sys.lambda.size());
  const Matrix symE = symmetrize(E);

  std::vector<Matrix> symE_pow{Matrix::Identity(d, d)};
  for (int a = 1; a <= gamma + 1; ++a) symE_pow.push_back(symE_pow.back() * symE);
  // Cross products W^T symE^a W reduce every monomial matrix to scalars.
  std::vector<Matrix> Y;
  for (int a = 0; a <= gamma + 1; ++a) {
    Y.push_back(sys.W.transpose() * symE_pow[a] * sys.W);
  }

  Matrix brute = Matrix::Zero(d, d);
  for (int h = 1; h <= gamma / 2 + 1; ++h) {
    for (const AlphaBeta& ab : enumerate_partitions(gamma, h)) {
      int beta = 0;
      for (int b : ab.beta) beta += b;
      std::vector<int> I(beta, 0);
      for (;;) {
        double coef = integral_coefficient_residue(I, sys.lambda, S, nu, gamma);
        if (coef != 0.0) {
          // Scalar chain: within a block consecutive X entries, between
          // blocks the symE^{alpha_k + 1} cross product.
          double chain = 1.0;
          int pos = 0;
          for (int b = 0; b < h; ++b) {
            for (int j = 1; j < ab.beta[b]; ++j) {
              chain *= Y[1](I[pos + j - 1], I[pos + j]);
            }
            pos += ab.beta[b];
            if (b + 1 < h) chain *= Y[ab.alpha[b + 1] + 1](I[pos - 1], I[pos]);
          }
          Vector left = symE_pow[ab.alpha[0]] * sys.W.col(I.front());
          Vector right = symE_pow[ab.alpha[h]].transpose() * sys.W.col(I.back());
          brute += coef * chain * left * right.transpose();
        }
        int k = beta - 1;
        while (k >= 0 && I[k] == two_r - 1) I[k--] = 0;
        if (k < 0) break;
        ++I[k];
      }
    }
  }

  Matrix direct = resolvent_series_terms(sys, E, nu, gamma, contour)[gamma - 1];
  double denom = direct.norm();
  double resid = (brute - direct).norm();
  return denom > 1e-14 ? resid / denom : resid;
}

}  // namespace mclab
