#include <cmath>
#include <cstring>
#include <random>

#include <gtest/gtest.h>

#include "genfe/scalars.hpp"

namespace {

using genfe::BasisData;
using genfe::Dual;
using genfe::NestedDual;
using genfe::Pce;

// Composite Simpson rule on [-1, 1]; independent of the library's
// Gauss-Legendre machinery.
template <class F>
double simpson(F&& f, int intervals = 4000) {
  const double h = 2.0 / intervals;
  double sum = f(-1.0) + f(1.0);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(-1.0 + i * h);
  return sum * h / 3.0;
}

// Explicit Legendre polynomials up to degree 3.
double p(int k, double x) {
  switch (k) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return 0.5 * (3 * x * x - 1);
    case 3: return 0.5 * (5 * x * x * x - 3 * x);
  }
  return NAN;
}

bool sameBits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

TEST(Dual, PolynomialSourceExample) {
  const Dual x = Dual::seeded(3.0, 1, 0);
  const double alpha = 1.0, beta = 2.0;
  const Dual s = alpha + beta * x * x;
  EXPECT_DOUBLE_EQ(s.val(), 19.0);
  EXPECT_DOUBLE_EQ(s.dx(0), 12.0);
}

TEST(Dual, SelfSubtractionIsZero) {
  const Dual x = Dual::seeded(5.0, 1, 0);
  const Dual d = x - x;
  EXPECT_EQ(d.val(), 0.0);
  EXPECT_EQ(d.dx(0), 0.0);
}

TEST(Dual, QuotientRule) {
  const Dual x = Dual::seeded(2.0, 1, 0);
  const Dual f = x / (1.0 + x);
  EXPECT_DOUBLE_EQ(f.val(), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.dx(0), 1.0 / 9.0);
}

TEST(Dual, ConstantHasZeroPartials) {
  const Dual c(2.5);
  EXPECT_TRUE(c.isConstant());
  EXPECT_EQ(c.dx(3), 0.0);
  const Dual x = Dual::seeded(1.0, 4, 2);
  const Dual y = x * c + c;
  EXPECT_EQ(y.size(), 4u);
  EXPECT_EQ(y.dx(0), 0.0);
  EXPECT_EQ(y.dx(2), 2.5);
}

TEST(Dual, WidthMismatchThrows) {
  const Dual a = Dual::seeded(1.0, 2, 0);
  const Dual b = Dual::seeded(1.0, 3, 0);
  EXPECT_THROW(a + b, genfe::UsageError);
  EXPECT_THROW(a * b, genfe::UsageError);
}

TEST(Dual, DivisionByZeroValueThrows) {
  const Dual a = Dual::seeded(1.0, 1, 0);
  EXPECT_THROW(a / Dual(0.0), genfe::DomainError);
  EXPECT_THROW(1.0 / (a - 1.0), genfe::DomainError);
}

TEST(Dual, Transcendentals) {
  const Dual e = exp(Dual::seeded(0.0, 1, 0));
  EXPECT_DOUBLE_EQ(e.val(), 1.0);
  EXPECT_DOUBLE_EQ(e.dx(0), 1.0);

  Dual one(1.0, 1);
  one.fastAccessDx(0) = 2.0;
  const Dual l = log(one);
  EXPECT_DOUBLE_EQ(l.val(), 0.0);
  EXPECT_DOUBLE_EQ(l.dx(0), 2.0);

  const Dual s = sqrt(Dual::seeded(4.0, 1, 0));
  EXPECT_DOUBLE_EQ(s.val(), 2.0);
  EXPECT_DOUBLE_EQ(s.dx(0), 0.25);

  const Dual pw = pow(Dual::seeded(2.0, 1, 0), 3.0);
  EXPECT_DOUBLE_EQ(pw.val(), 8.0);
  EXPECT_DOUBLE_EQ(pw.dx(0), 12.0);

  const Dual sn = sin(Dual::seeded(0.5, 1, 0));
  EXPECT_DOUBLE_EQ(sn.val(), std::sin(0.5));
  EXPECT_DOUBLE_EQ(sn.dx(0), std::cos(0.5));
  const Dual cs = cos(Dual::seeded(0.5, 1, 0));
  EXPECT_DOUBLE_EQ(cs.val(), std::cos(0.5));
  EXPECT_DOUBLE_EQ(cs.dx(0), -std::sin(0.5));
}

TEST(Dual, TranscendentalDomainErrors) {
  EXPECT_THROW(log(Dual::seeded(0.0, 1, 0)), genfe::DomainError);
  EXPECT_THROW(log(Dual::seeded(-1.0, 1, 0)), genfe::DomainError);
  EXPECT_THROW(sqrt(Dual::seeded(-1.0, 1, 0)), genfe::DomainError);
  EXPECT_THROW(sqrt(Dual::seeded(0.0, 1, 0)), genfe::DomainError);
}

TEST(Dual, ComparisonsUseValueOnly) {
  const Dual a = Dual::seeded(1.0, 2, 0);
  const Dual b = Dual::seeded(1.0, 2, 1);
  EXPECT_TRUE(a == b);
  EXPECT_TRUE(a < 2.0);
  EXPECT_DOUBLE_EQ(genfe::stripDerivatives(a), 1.0);
}

TEST(Dual, WideDerivativeArraysSpillToHeap) {
  const std::size_t width = 40;
  const Dual x = Dual::seeded(2.0, width, 39);
  const Dual y = x * x;
  EXPECT_EQ(y.size(), width);
  EXPECT_DOUBLE_EQ(y.dx(39), 4.0);
  EXPECT_DOUBLE_EQ(y.dx(0), 0.0);
}

// Randomized composite expressions evaluated generically.
template <class S>
S composite(int which, const S& x, const S& y) {
  switch (which % 5) {
    case 0: return exp(x * y / (1.0 + x * x)) + sqrt(1.0 + y * y) * log(2.0 + x * x);
    case 1: return pow(1.0 + x * x, 1.5) / (3.0 + y * y) - x * y * y;
    case 2: return (x - y) * (x + 2.0 * y) / (4.0 + x * x + y * y);
    case 3: return log(1.0 + exp(x)) * y + 1.0 / (1.5 + sqrt(x * x + y * y + 0.1));
    default: return pow(2.0 + x * x, 1.0 + 0.1 * y) - 3.0 * x;
  }
}

double compositeReal(int which, double x, double y) {
  using std::exp, std::log, std::pow, std::sqrt;
  return composite<double>(which, x, y);
}

TEST(DualProperty, ChainRuleMatchesCentralDifferences) {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  int cases = 0;
  for (int n = 0; n < 1500; ++n) {
    const double x0 = dist(rng), y0 = dist(rng);
    const int which = n;
    const Dual x = Dual::seeded(x0, 2, 0);
    const Dual y = Dual::seeded(y0, 2, 1);
    const Dual f = composite<Dual>(which, x, y);

    const double hx = 1e-6 * (1.0 + std::abs(x0));
    const double hy = 1e-6 * (1.0 + std::abs(y0));
    const double fdx = (compositeReal(which, x0 + hx, y0) - compositeReal(which, x0 - hx, y0)) / (2 * hx);
    const double fdy = (compositeReal(which, x0, y0 + hy) - compositeReal(which, x0, y0 - hy)) / (2 * hy);
    EXPECT_LE(std::abs(f.dx(0) - fdx), 1e-6 * std::max(1.0, std::abs(fdx))) << "case " << n;
    EXPECT_LE(std::abs(f.dx(1) - fdy), 1e-6 * std::max(1.0, std::abs(fdy))) << "case " << n;
    // value path is bitwise identical to the real evaluation
    EXPECT_TRUE(sameBits(f.val(), compositeReal(which, x0, y0))) << "case " << n;
    ++cases;
  }
  EXPECT_GE(cases, 1000);
}

TEST(DualProperty, ArithmeticOnlyExpressionsMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.5, 3.0);
  for (int n = 0; n < 1000; ++n) {
    const double a = dist(rng), b = dist(rng), c = dist(rng);
    auto f = [&](auto x) { return (a * x * x - b) / (c + x) + x * (x - a) * b; };
    const double x0 = dist(rng);
    const Dual d = f(Dual::seeded(x0, 1, 0));
    const double h = 1e-6 * (1.0 + x0);
    const double fd = (f(x0 + h) - f(x0 - h)) / (2 * h);
    ASSERT_LE(std::abs(d.dx(0) - fd), 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(BasisData, DegreeZero) {
  const BasisData b(0);
  EXPECT_EQ(b.size(), 1u);
  EXPECT_EQ(b.norm(0), 1.0);
  EXPECT_EQ(b.tripleProduct(0, 0, 0), 1.0);
}

TEST(BasisData, DegreeOneSecondMoment) {
  const BasisData b(1);
  EXPECT_NEAR(b.tripleProduct(0, 1, 1), 1.0 / 3.0, 1e-15);
}

TEST(BasisData, TripleProductsAgainstSimpsonOracle) {
  const BasisData b(3);
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; j <= 3; ++j)
      for (int k = 0; k <= 3; ++k) {
        const double oracle = 0.5 * simpson([&](double x) { return p(i, x) * p(j, x) * p(k, x); });
        EXPECT_NEAR(b.tripleProduct(i, j, k), oracle, 1e-12) << i << j << k;
      }
  // E[P1 P2 P3] = 3/35, frozen from the Simpson oracle above.
  EXPECT_NEAR(b.tripleProduct(1, 2, 3), 3.0 / 35.0, 1e-14);
}

TEST(BasisData, SymmetryAndParityInvariants) {
  for (std::size_t degree : {0u, 1u, 2u, 3u, 5u, 8u}) {
    const BasisData b(degree);
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_EQ(b.tripleProduct(i, j, 0), i == j ? b.norm(i) : 0.0);
        for (std::size_t k = 0; k < n; ++k) {
          const double c = b.tripleProduct(i, j, k);
          EXPECT_EQ(c, b.tripleProduct(j, i, k));
          EXPECT_EQ(c, b.tripleProduct(k, j, i));
          EXPECT_EQ(c, b.tripleProduct(i, k, j));
          if ((i + j + k) % 2 == 1 || i > j + k || j > i + k || k > i + j) EXPECT_EQ(c, 0.0);
        }
      }
    for (std::size_t k = 0; k < n; ++k) EXPECT_DOUBLE_EQ(b.norm(k), 1.0 / (2.0 * k + 1.0));
  }
}

TEST(Pce, SquareOfFirstOrder) {
  const BasisData b(3);
  const Pce x(b, {0, 1, 0, 0});
  const Pce sq = x * x;
  EXPECT_NEAR(sq.coeff(0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(sq.coeff(1), 0.0, 1e-15);
  EXPECT_NEAR(sq.coeff(2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(sq.coeff(3), 0.0, 1e-15);
}

TEST(Pce, ConstantTimesExpansionScales) {
  const BasisData b(3);
  const Pce a(b, {1.5, -2, 0.25, 3});
  const Pce c(b, {4, 0, 0, 0});
  const Pce r = c * a;
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(r.coeff(k), 4 * a.coeff(k));
  const Pce r2 = 4.0 * a;
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(r2.coeff(k), 4 * a.coeff(k));
}

TEST(Pce, FirstTimesSecondAgainstProjectionOracle) {
  const BasisData b(3);
  const Pce r = Pce(b, {0, 1, 0, 0}) * Pce(b, {0, 0, 1, 0});
  for (int k = 0; k <= 3; ++k) {
    const double oracle = (2 * k + 1) / 2.0 * simpson([&](double x) { return x * p(2, x) * p(k, x); });
    EXPECT_NEAR(r.coeff(k), oracle, 1e-12) << k;
  }
  EXPECT_NEAR(r.coeff(1), 0.4, 1e-14);
  EXPECT_NEAR(r.coeff(3), 0.6, 1e-14);
}

TEST(Pce, DivideByConstant) {
  const BasisData b(3);
  const Pce a(b, {2, 4, -6, 8});
  const Pce r = a / Pce(b, {2, 0, 0, 0});
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(r.coeff(k), a.coeff(k) / 2);
}

TEST(Pce, DivisionRoundTrip) {
  const BasisData b(3);
  const Pce d(b, {1, 0.2, 0, 0});
  const Pce x(b, {0.7, -0.3, 0.11, 0.05});
  const Pce r = (d * x) / d;
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(r.coeff(k), x.coeff(k), 1e-13);
}

// Galerkin reciprocal vs. the 20-node projection of 1/(1 + 0.5 xi). At
// P = 3 the truncation error is ~5e-3 in coefficients 2 and 3, so those are
// checked at P = 5 where the Galerkin quotient has converged below 1e-3.
TEST(Pce, ReciprocalAgainstNispOracle) {
  const auto rule = genfe::gaussLegendre(20);
  auto projection = [&](int k) {
    double proj = 0;
    for (std::size_t q = 0; q < 20; ++q)
      proj += rule.weights[q] * std::legendre(k, rule.nodes[q]) / (1.0 + 0.5 * rule.nodes[q]);
    return proj * (2 * k + 1) / 2.0;
  };
  const BasisData b3(3);
  const Pce r3 = 1.0 / Pce(b3, {1, 0.5, 0, 0});
  for (int k = 0; k <= 1; ++k) EXPECT_NEAR(r3.coeff(k), projection(k), 1e-3) << k;
  for (int k = 2; k <= 3; ++k) EXPECT_NEAR(r3.coeff(k), projection(k), 1e-2) << k;

  const BasisData b5(5);
  const Pce r5 = 1.0 / Pce(b5, {1, 0.5});
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(r5.coeff(k), projection(k), 1e-3) << k;
}

TEST(Pce, SingularDivisorReportsCondition) {
  const BasisData b(3);
  // b(xi) = xi vanishes inside the support
  try {
    (void)(Pce(b, {1, 0, 0, 0}) / Pce(b, {0, 1, 0, 0}));
    // Galerkin matrix of xi is singular for odd P+1? it may still be
    // solvable; fall through to the definitely singular case below.
  } catch (const genfe::DomainError&) {
  }
  EXPECT_THROW((void)(Pce(b, {1, 0, 0, 0}) / Pce(b, {0, 0, 0, 0})), genfe::DomainError);
}

TEST(Pce, MismatchedBasisThrows) {
  const BasisData b1(3), b2(3);
  EXPECT_THROW((void)(Pce(b1, {1, 1}) * Pce(b2, {1, 1})), genfe::UsageError);
  EXPECT_THROW((void)(Pce(b1, {1, 1}) + Pce(b2, {1, 1})), genfe::UsageError);
}

TEST(Pce, Evaluate) {
  const BasisData b(3);
  EXPECT_DOUBLE_EQ(Pce(b, {35, 15, 0, 0}).evaluate(1.0), 50.0);
  EXPECT_DOUBLE_EQ(Pce(b, {2.5, 0, 0, 0}).evaluate(-0.3), 2.5);
  EXPECT_DOUBLE_EQ(Pce(b, {0, 0, 1, 0}).evaluate(0.0), -0.5);
  EXPECT_DOUBLE_EQ(genfe::pceEvaluate(Pce(7.0), 0.9), 7.0);
}

TEST(Pce, MeanOfConstant) {
  const Pce c(3.25);
  EXPECT_EQ(c.mean(), 3.25);
  EXPECT_TRUE(c.deterministic());
}

TEST(PceProperty, ProductMatchesPointwiseWhenDegreesFit) {
  const BasisData b(4);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    // deg(a) = 2, deg(c) = 2 -> exact in degree 4
    const Pce a(b, {dist(rng), dist(rng), dist(rng)});
    const Pce c(b, {dist(rng), dist(rng), dist(rng)});
    const Pce ac = a * c;
    for (double xi : b.quadrature().nodes) EXPECT_NEAR(ac.evaluate(xi), a.evaluate(xi) * c.evaluate(xi), 1e-13);
  }
}

TEST(PceProperty, TruncatedProductIsProjection) {
  // deg(a)+deg(c) > P: the Galerkin product equals the L2 projection of
  // the pointwise product onto degree P.
  const BasisData b(3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int n = 0; n < 50; ++n) {
    const Pce a(b, {dist(rng), dist(rng), dist(rng), dist(rng)});
    const Pce c(b, {dist(rng), dist(rng), dist(rng), dist(rng)});
    const Pce ac = a * c;
    for (int k = 0; k <= 3; ++k) {
      const double proj =
          (2 * k + 1) / 2.0 * simpson([&](double x) { return a.evaluate(x) * c.evaluate(x) * p(k, x); });
      EXPECT_NEAR(ac.coeff(k), proj, 1e-9);
    }
  }
}

TEST(NestedDual, DerivativesOfExpansions) {
  const BasisData b(3);
  // f(x) = x * x with x = (1 + 0.5 xi) seeded as the independent variable
  const NestedDual x = NestedDual::seeded(Pce(b, {1, 0.5, 0, 0}), 1, 0);
  const NestedDual f = x * x + 2.0 * x;
  const Pce expectVal = Pce(b, {1, 0.5, 0, 0}) * Pce(b, {1, 0.5, 0, 0}) + 2.0 * Pce(b, {1, 0.5, 0, 0});
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(f.val().coeff(k), expectVal.coeff(k), 1e-15);
  // df/dx = 2x + 2
  EXPECT_NEAR(f.dx(0).coeff(0), 4.0, 1e-15);
  EXPECT_NEAR(f.dx(0).coeff(1), 1.0, 1e-15);
  const NestedDual q = 1.0 / x;
  // d(1/x)/dx = -1/x^2 in Galerkin arithmetic
  const Pce expectD = -(1.0 / Pce(b, {1, 0.5, 0, 0})) / Pce(b, {1, 0.5, 0, 0});
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(q.dx(0).coeff(k), expectD.coeff(k), 1e-12);
}

TEST(NestedDual, DeterministicMeanMatchesRealPathBitwise) {
  const BasisData b(3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  for (int n = 0; n < 200; ++n) {
    const double x0 = dist(rng), y0 = dist(rng);
    auto f = [](auto x, auto y) { return (x * y + 3.0) / (1.0 + x * x) - y * (x - 2.0); };
    const NestedDual x = NestedDual::seeded(Pce(b, {x0, 0, 0, 0}), 2, 0);
    const NestedDual y = NestedDual::seeded(Pce(b, {y0, 0, 0, 0}), 2, 1);
    const Pce pv = f(Pce(b, {x0}), Pce(b, {y0}));
    EXPECT_TRUE(sameBits(f(x, y).val().mean(), f(x0, y0)));
    EXPECT_TRUE(sameBits(pv.mean(), f(x0, y0)));
    for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(pv.coeff(k), 0.0);
  }
}

}  // namespace
