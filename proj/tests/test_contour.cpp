#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mclab/contour.hpp"
#include "mclab/rng.hpp"

using namespace mclab;

namespace {
Vector plus_minus(std::initializer_list<double> sig) {
  Vector s(static_cast<int>(sig.size()));
  int i = 0;
  for (double v : sig) s(i++) = v;
  Vector lam(2 * s.size());
  lam << s, -s;
  return lam;
}
}  // namespace

TEST_CASE("single-factor coefficient is 1/lambda") {
  Vector lam = plus_minus({3.0, 1.5});
  // gamma = 1, nu = 0, I = (0): one enclosed simple pole at lambda_0 = 3,
  // the pole at zero stays outside, so the integral evaluates to 1/3.
  double c = integral_coefficient_residue({0}, lam, {0}, 0, 1);
  CHECK(c == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  // Same sequence but the contour selects index 1: nothing enclosed.
  CHECK(integral_coefficient_residue({0}, lam, {1}, 0, 1) == 0.0);
}

TEST_CASE("coefficients vanish when no pole is enclosed") {
  Vector lam = plus_minus({4.0, 2.0, 1.0});
  CHECK(integral_coefficient_residue({1, 2, 4}, lam, {0}, 0, 3) == 0.0);
  CHECK(integral_coefficient_residue({1, 1}, lam, {0, 2}, 0, 2) == 0.0);
}

TEST_CASE("residue and quadrature agree on random samples") {
  RngStream rng(99);
  for (int t = 0; t < 60; ++t) {
    Vector sig(3);
    // distinct values on an exact 1/8 grid
    int a = static_cast<int>(rng.uniform_int(20, 40));
    int b = static_cast<int>(rng.uniform_int(10, 19));
    int c = static_cast<int>(rng.uniform_int(2, 9));
    sig << a / 8.0, b / 8.0, c / 8.0;
    Vector lam = plus_minus({sig(0), sig(1), sig(2)});
    std::vector<int> S{0};
    int gamma = 1 + static_cast<int>(rng.uniform_int(0, 4));
    int nu = static_cast<int>(rng.uniform_int(0, 1));
    std::vector<int> I;
    for (int k = 0; k <= gamma - 1 + nu && static_cast<int>(I.size()) < gamma; ++k) {
      I.push_back(static_cast<int>(rng.uniform_int(0, 5)));
    }
    if (nu == 1) I[0] = 0;  // nu = 1 needs an S factor up front to be nonzero
    double res = integral_coefficient_residue(I, lam, S, nu, gamma);
    ContourSpec contour = build_contour(sig, Vector(), S, 3, 0.25 / 2, 64);
    double quad = integral_coefficient_quadrature(I, lam, S, nu, gamma, contour);
    CHECK(std::abs(res - quad) <=
          1e-8 * std::max({1.0, std::abs(res), std::abs(quad)}));
  }
}

TEST_CASE("degenerate spectra are rejected") {
  Vector lam(4);
  lam << 2.0, 2.0, -2.0, -2.0;  // repeated eigenvalue
  CHECK_THROWS_AS(integral_coefficient_residue({0, 1}, lam, {0}, 0, 2),
                  DegeneracyError);
  Vector lz(2);
  lz << 0.0, 0.0;
  CHECK_THROWS_AS(integral_coefficient_residue({0}, lz, {0}, 0, 1),
                  DegeneracyError);
}

TEST_CASE("contour geometry keeps the right poles inside") {
  Vector sig(3);
  sig << 5.0, 3.0, 1.0;
  Vector sig_t(3);
  sig_t << 5.1, 3.05, 0.95;
  std::vector<int> S{0, 1};
  double dS = 2.0;  // separation of {5, 3} from {1} and 0
  ContourSpec c = build_contour(sig, sig_t, S, 3, dS, 32);
  auto inside = [&](double x) {
    return std::abs(x - c.positive.center) < c.positive.radius;
  };
  CHECK(inside(5.0));
  CHECK(inside(3.0));
  CHECK(inside(5.1));
  CHECK(inside(3.05));
  CHECK_FALSE(inside(1.0));
  CHECK_FALSE(inside(0.95));
  CHECK_FALSE(inside(0.0));
  CHECK(c.negative.center == doctest::Approx(-c.positive.center));
  CHECK(c.negative.radius == doctest::Approx(c.positive.radius));

  // A separation wider than the actual gap leaves no room for the contour.
  Vector tight(2);
  tight << 1.0, 0.999999;
  CHECK_THROWS_AS(build_contour(tight, Vector(), {0}, 2, 0.1, 32),
                  ContourError);
}

TEST_CASE("partition enumeration for the smallest orders by hand") {
  // gamma = 1, h = 1: alpha0 + alpha1 + beta1 = 2 with beta1 >= 1:
  // (0,1|1), (1,0|1), (0,0|2).
  auto p11 = enumerate_partitions(1, 1);
  CHECK(p11.size() == 3);
  for (const auto& ab : p11) {
    CHECK(ab.alpha.size() == 2);
    CHECK(ab.beta.size() == 1);
    int sum = ab.alpha[0] + ab.alpha[1] + ab.beta[0];
    CHECK(sum == 2);
    CHECK(ab.beta[0] >= 1);
  }
  CHECK(enumerate_partitions(1, 2).empty());   // h > floor(1/2) + 1
  CHECK(enumerate_partitions(3, 0).empty());
  // gamma = 2, h = 1: compositions of 3 as alpha0 + alpha1 + beta1, beta1 >= 1:
  // beta1 = 1: (0,2),(1,1),(2,0); beta1 = 2: (0,1),(1,0); beta1 = 3: (0,0).
  CHECK(enumerate_partitions(2, 1).size() == 6);
}

TEST_CASE("closed-form count equals the enumeration size") {
  for (int gamma = 1; gamma <= 8; ++gamma) {
    for (int h = 0; h <= gamma / 2 + 2; ++h) {
      CHECK(partition_count(gamma, h) ==
            static_cast<std::int64_t>(enumerate_partitions(gamma, h).size()));
    }
  }
}

TEST_CASE("interior alphas are positive and beta sums close the budget") {
  for (int gamma = 2; gamma <= 6; ++gamma) {
    for (int h = 1; h <= gamma / 2 + 1; ++h) {
      for (const auto& ab : enumerate_partitions(gamma, h)) {
        int total = 0;
        for (size_t k = 0; k < ab.alpha.size(); ++k) {
          total += ab.alpha[k];
          if (k > 0 && k + 1 < ab.alpha.size()) CHECK(ab.alpha[k] >= 1);
        }
        for (int b : ab.beta) {
          CHECK(b >= 1);
          total += b;
        }
        CHECK(total == gamma + 1);
      }
    }
  }
}

TEST_CASE("sampled coefficient bounds hold") {
  CoefficientBoundTable t = verify_coefficient_bounds(120, 5, 3, 7);
  CHECK(t.samples.size() == 120);
  CHECK(t.violations == 0);
  CHECK(t.max_quadrature_gap <= 1e-8);
}

TEST_CASE("series terms match the brute-force expansion") {
  RngStream rng(31);
  Matrix A(6, 5);
  Matrix E(6, 5);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 5; ++j) {
      A(i, j) = rng.gaussian();
      E(i, j) = 0.05 * rng.gaussian();
    }
  }
  A = 3.0 * A;  // push the spectrum away from zero
  SvdFactors f = svd(A);
  SymmetrizedSystem sys = build_symmetrized_system(f, 2);
  std::vector<int> S{0};
  double dS = std::min(f.sigma(0) - f.sigma(1), f.sigma(1));
  ContourSpec contour =
      build_contour(f.sigma.head(2), svd(A + E).sigma.head(2), S, 2,
                    std::min(dS, f.sigma(0) - f.sigma(1)), 64);
  for (int gamma = 1; gamma <= 3; ++gamma) {
    double resid = expansion_consistency_check(sys, E, S, 0, gamma, contour);
    CHECK(resid < 1e-7);
  }
}
