#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "genfe/analysis.hpp"
#include "genfe/morphing.hpp"
#include "genfe/physics.hpp"

namespace {

using namespace genfe;

CsrMatrix denseMatrix(const std::vector<std::vector<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> rowPtr{0}, colIdx;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) colIdx.push_back(c);
    rowPtr.push_back(colIdx.size());
  }
  CsrMatrix m(n, n, rowPtr, colIdx);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m.add(r, c, a[r][c]);
  return m;
}

void setAllBeta(ProblemOptions& o, double beta) {
  for (const char* region : {"conductor", "pad", "slider"}) {
    Material m = o.materials.get(region);
    m.beta = beta;
    o.materials.set(region, m);
  }
}

const SliderResolution kSmall{2, 1, 2, 4};

TEST(ReducedGradient, ScalarToy) {
  // f = x - p^2, g = x: J = 1, f_p = -2p, dg/dp = 2p
  const CsrMatrix j = denseMatrix({{1.0}});
  for (double p : {-0.7, 0.0, 0.4}) {
    MultiVector fp(1, 1);
    fp(0, 0) = -2.0 * p;
    const std::vector<double> dgdx{1.0};
    EXPECT_DOUBLE_EQ(reducedGradient(j, fp, dgdx)[0], 2.0 * p);
  }
}

TEST(ReducedGradient, ZeroSensitivityAndLinearity) {
  const CsrMatrix j = denseMatrix({{4.0, 1.0, 0.0}, {1.0, 3.0, -1.0}, {0.0, 2.0, 5.0}});
  MultiVector zero(3, 2);
  const std::vector<double> dgdx{0.3, -1.0, 2.0};
  EXPECT_EQ(reducedGradient(j, zero, dgdx), (std::vector<double>{0.0, 0.0}));

  MultiVector fp(3, 2);
  fp(0, 0) = 1.0;
  fp(2, 0) = -2.0;
  fp(1, 1) = 0.5;
  const auto g1 = reducedGradient(j, fp, dgdx);
  std::vector<double> twice(dgdx);
  for (double& v : twice) v *= 2.0;
  const auto g2 = reducedGradient(j, fp, twice);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(g2[k], 2.0 * g1[k], 1e-14);

  // -dgdx^T J^-1 fp with J^-1 from the adjugate: det = 4(15+2) - 1(5) = 63
  const double inv[3][3] = {{17.0 / 63, -5.0 / 63, -1.0 / 63},
                            {-5.0 / 63, 20.0 / 63, 4.0 / 63},
                            {2.0 / 63, -8.0 / 63, 11.0 / 63}};
  for (std::size_t k = 0; k < 2; ++k) {
    double expected = 0.0;
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) expected -= dgdx[r] * inv[r][c] * fp(c, k);
    EXPECT_NEAR(g1[k], expected, 1e-14);
  }
}

TEST(ReducedGradient, SizeMismatchThrows) {
  const CsrMatrix j = denseMatrix({{1.0, 0.0}, {0.0, 1.0}});
  MultiVector fp(3, 1);
  EXPECT_THROW(reducedGradient(j, fp, std::vector<double>{1.0, 0.0}), UsageError);
}

OptimizerObjective quadratic(double target) {
  return [target](std::span<const double> p) {
    return std::make_pair((p[0] - target) * (p[0] - target), std::vector<double>{2.0 * (p[0] - target)});
  };
}

TEST(Optimizer, QuadraticSurrogate) {
  const OptimizerResult r = optimize(quadratic(0.3), {-0.8}, {-1.0}, {1.0});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.p[0], 0.3, 1e-6);
}

TEST(Optimizer, StartAtMinimizer) {
  const OptimizerResult r = optimize(quadratic(0.3), {0.3}, {-1.0}, {1.0});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.acceptedSteps, 0u);
  EXPECT_EQ(r.p[0], 0.3);
}

TEST(Optimizer, ArmijoNeverIncreases) {
  // Rosenbrock in a box that contains the minimizer
  auto rosen = [](std::span<const double> p) {
    const double a = 1.0 - p[0], b = p[1] - p[0] * p[0];
    return std::make_pair(a * a + 100.0 * b * b,
                          std::vector<double>{-2.0 * a - 400.0 * p[0] * b, 200.0 * b});
  };
  const OptimizerResult r = optimize(rosen, {-1.2, 1.0}, {-2.0, -2.0}, {2.0, 2.0}, {1e-8, 1e-12, 500});
  ASSERT_GE(r.history.size(), 2u);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i].g, r.history[i - 1].g);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.p[0], 1.0, 1e-5);
  EXPECT_NEAR(r.p[1], 1.0, 1e-5);
}

TEST(Optimizer, ActiveBound) {
  const OptimizerResult r = optimize(quadratic(2.0), {0.0}, {-1.0}, {1.0});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.p[0], 1.0);
  EXPECT_THROW(optimize(quadratic(0.0), {0.0}, {1.0}, {-1.0}), ConfigError);
}

TEST(Optimizer, FailingEvaluation) {
  auto bad = [](std::span<const double> p) -> std::pair<double, std::vector<double>> {
    if (p[0] > 0.5) throw SolverError("no convergence");
    return {-p[0], {-1.0}};
  };
  const OptimizerResult r = optimize(bad, {0.0}, {-1.0}, {1.0});
  EXPECT_TRUE(r.failed);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.p[0], 0.5);
}

TEST(Newton, LinearProblemOneStep) {
  ProblemOptions o;
  setAllBeta(o, 0.0);
  o.jouleHeating = false;
  ThermoElectricProblem p(buildSliderMesh({}, kSmall), o);
  const NewtonResult r = newtonSolve(p, p.initialGuess());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1u);
  const NewtonResult again = newtonSolve(p, r.x);
  EXPECT_EQ(again.iterations, 0u);
  EXPECT_EQ(again.x, r.x);
}

TEST(Newton, CoupledDemoConvergesQuadratically) {
  ThermoElectricProblem p(buildSliderMesh({}, {}), ProblemOptions{});
  const NewtonResult r = solveState(p);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 8u);
  EXPECT_GT(terminalConvergenceOrder(r.history), 1.5);
  EXPECT_TRUE(p.conductivityFeedback());
}

TEST(Newton, IterationLimit) {
  ThermoElectricProblem p(buildSliderMesh({}, kSmall), ProblemOptions{});
  NewtonConfig c;
  c.maxIters = 1;
  EXPECT_THROW(solveState(p, c), SolverError);
  EXPECT_TRUE(p.conductivityFeedback());
}

TEST(Newton, ConvergenceOrderOfSyntheticHistory) {
  EXPECT_NEAR(terminalConvergenceOrder({1e-1, 1e-2, 1e-4, 1e-8}), 2.0, 1e-12);
  EXPECT_NEAR(terminalConvergenceOrder({1.0, 0.5, 0.25, 0.125}), 1.0, 1e-12);
  EXPECT_NEAR(terminalConvergenceOrder({1.0, 1e-1, 1e-2, 1e-4, 1e-15}), 2.0, 1e-12);
}

TEST(Nisp, ProjectionIdentities) {
  const auto basis = buildBasisData(3);
  const auto constant = nispProject(*basis, 6, [](double) { return std::vector<double>{4.25}; });
  EXPECT_NEAR(constant[0][0], 4.25, 1e-14);
  for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(constant[0][k], 0.0, 1e-14);

  const std::vector<double> sigma{35.0, 15.0};
  const auto identity =
      nispProject(*basis, 6, [&](double xi) { return std::vector<double>{evaluateExpansion(sigma, xi)}; });
  const double expected[4] = {35.0, 15.0, 0.0, 0.0};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(identity[0][k], expected[k], 1e-13);
}

TEST(Nisp, OracleRestoresParameters) {
  ThermoElectricProblem p(buildSliderMesh({}, kSmall), ProblemOptions{});
  const auto basis = buildBasisData(2);
  const auto c = nispOracle(p, *basis, {{"Pad Conductivity", {35.0, 15.0}}}, 3, std::size_t{1});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(p.parameters().getValue("Pad Conductivity"), 35.0);
  EXPECT_GT(c[0][0], 0.0);
}

TEST(Continuation, IgnoredParameterGivesEqualResponse) {
  // pad conductivity fixed in the material, so "Pad Conductivity" is unused
  ProblemOptions o;
  Material pad;
  pad.sigma0 = 35.0;
  o.materials.set("pad", pad);
  ThermoElectricProblem p(buildSliderMesh({}, kSmall), o);
  const auto x0 = solveState(p).x;
  const ContinuationResult r = continuation(parameterContinuation(p, "Pad Conductivity"), 20.0, 50.0, 2, x0);
  ASSERT_TRUE(r.complete);
  ASSERT_EQ(r.points.size(), 2u);
  EXPECT_EQ(r.points[0].g, r.points[1].g);

  // a response the toy system does not depend on
  int calls = 0;
  ContinuationProblem toy{[&](double) { ++calls; },
                          [](const std::vector<double>& x) { return NewtonResult{x, {0.0}, 0, true}; },
                          [](const std::vector<double>& x) { return x[0]; }};
  const ContinuationResult t = continuation(toy, 1.0, 2.0, 2, {7.0});
  EXPECT_EQ(calls, 2);
  EXPECT_EQ(t.points[0].g, t.points[1].g);
  EXPECT_EQ(t.points[1].p, 2.0);
}

TEST(Continuation, PadConductivitySweepIsMonotone) {
  ThermoElectricProblem p(buildSliderMesh({}, {}), ProblemOptions{});
  p.parameters().setValue("Pad Conductivity", 20.0);
  const auto x0 = solveState(p).x;
  const ContinuationResult r = continuation(parameterContinuation(p, "Pad Conductivity"), 20.0, 50.0, 7, x0);
  ASSERT_TRUE(r.complete) << r.message;
  ASSERT_EQ(r.points.size(), 7u);
  EXPECT_DOUBLE_EQ(r.points.back().p, 50.0);
  int sign = 0;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const double diff = r.points[i].g - r.points[i - 1].g;
    if (std::abs(diff) <= 1e-8) continue;
    const int s = diff > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    EXPECT_EQ(s, sign) << "step " << i;
  }
  EXPECT_NE(sign, 0);
}

TEST(Continuation, BisectsFailedSteps) {
  // the toy solve fails for jumps larger than 0.3
  double param = 0.0;
  ContinuationProblem toy{[&](double p) { param = p; },
                          [&](const std::vector<double>& x) {
                            if (std::abs(param - x[0]) > 0.3) throw SolverError("step too long");
                            return NewtonResult{{param}, {0.0}, 1, true};
                          },
                          [](const std::vector<double>& x) { return x[0] * x[0]; }};
  const ContinuationResult r = continuation(toy, 0.0, 1.0, 3, {0.0});
  ASSERT_TRUE(r.complete) << r.message;
  EXPECT_EQ(r.points[1].bisections, 1u);
  EXPECT_DOUBLE_EQ(r.points[2].g, 1.0);

  const ContinuationResult stuck = continuation(toy, 0.0, 100.0, 2, {0.0}, {2});
  EXPECT_FALSE(stuck.complete);
  EXPECT_EQ(stuck.points.size(), 1u);
  EXPECT_FALSE(stuck.message.empty());
}

TEST(StochasticGalerkin, ZeroUncertaintyDegenerates) {
  ThermoElectricProblem p(buildSliderMesh({}, kSmall), ProblemOptions{});
  const auto det = solveState(p).x;
  const SGResult r = sgNewtonSolve(p, buildBasisData(3), {{"Pad Conductivity", {35.0, 0.0, 0.0, 0.0}}});
  ASSERT_TRUE(r.converged);
  for (std::size_t i = 0; i < det.size(); ++i) EXPECT_NEAR(r.x[0][i], det[i], 1e-12 * (1.0 + std::abs(det[i])));
  for (std::size_t k = 1; k < 4; ++k)
    for (double v : r.x[k]) EXPECT_LE(std::abs(v), 1e-12);
}

TEST(StochasticGalerkin, LinearInParameterMatchesNisp) {
  // linear model with the source alpha uncertain: T is affine in alpha
  ProblemOptions o;
  setAllBeta(o, 0.0);
  o.jouleHeating = false;
  ThermoElectricProblem p(buildSliderMesh({}, kSmall), o);
  const auto basis = buildBasisData(2);
  const std::map<std::string, std::vector<double>> alpha{{"Alpha", {1.0, 0.5}}};
  const SGResult sg = sgNewtonSolve(p, basis, alpha);
  ASSERT_TRUE(sg.converged);
  const std::size_t probe = 2 * (p.mesh().numNodes() / 2) + 1;
  const auto nisp = nispOracle(p, *basis, alpha, 4, probe);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(sg.x[k][probe], nisp[1][k], 1e-10 * (1.0 + std::abs(nisp[1][k])));
  EXPECT_GT(std::abs(sg.x[1][probe]), 1e-6);
}

TEST(Shape, ReducedGradientMatchesFiniteDifferences) {
  const GeometryParams geom;
  const SliderResolution res{4, 1, 3, 8};
  ThermoElectricProblem p(buildSliderMesh(geom, res), ProblemOptions{});
  const SliderMorph morph(buildSliderMesh(geom, res), geom, MorphMode::OneParameter);
  ShapeObjective obj(p, morph);
  const ReducedGradientCheck c = checkReducedGradientFd(obj, std::vector<double>{0.1});
  EXPECT_LE(c.maxRelativeError, 1e-4) << c.analytic[0] << " vs " << c.fd[0];
}

TEST(Shape, ZeroMorphSensitivityGivesZeroGradient) {
  ThermoElectricProblem p(buildSliderMesh({}, kSmall), ProblemOptions{});
  const auto x = solveState(p).x;
  MultiVector xp(2 * p.mesh().numNodes(), 1);
  std::vector<double> f;
  MultiVector fp;
  p.shapeTangent(x, xp, f, fp);
  CsrMatrix j;
  p.jacobian(x, f, j);
  const auto grad = reducedGradient(j, fp, objectiveMaxTemperature(x).gradient(x.size()));
  EXPECT_EQ(grad[0], 0.0);
}

}  // namespace
