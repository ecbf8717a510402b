#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "genfe/analysis/newton.hpp"
#include "genfe/analysis/sensitivity.hpp"
#include "genfe/analysis/stochastic.hpp"
#include "genfe/discretization/basis.hpp"
#include "genfe/discretization/mesh.hpp"
#include "genfe/morphing/morph.hpp"
#include "genfe/physics/problem.hpp"

namespace genfe {

/// State with psi uniform in [0, psiMax], T uniform in [0, tMax] and the
/// Dirichlet values imposed.
inline std::vector<double> randomState(const ThermoElectricProblem& problem, std::mt19937_64& rng, double psiMax = 0.5,
                                       double tMax = 3.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(problem.numDofs());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = (i % ThermoElectricProblem::kNumEq == ThermoElectricProblem::kPotentialEq ? psiMax : tMax) * u(rng);
  problem.dirichlet().impose(x);
  return x;
}

/// |a - b| / max(|a|, |b|, floor)
inline double relativeDifference(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

struct JacobianCheck {
  double maxRelativeError = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Compares the AD Jacobian with fourth-order central differences of the
/// residual, column by column with h = 1e-3 (1 + |x_j|). Entries smaller
/// than floorScale * max|J| are compared against that floor.
inline JacobianCheck checkJacobianFd(ThermoElectricProblem& problem, std::span<const double> x,
                                     double floorScale = 1e-8) {
  std::vector<double> f, f1, f2, f3, f4;
  CsrMatrix jac;
  problem.jacobian(x, f, jac);
  double scale = 0.0;
  for (double v : jac.values()) scale = std::max(scale, std::abs(v));
  const double floor = floorScale * scale;
  const Eigen::MatrixXd dense = jac.toDense();
  std::vector<double> xt(x.begin(), x.end());
  JacobianCheck out;
  for (std::size_t j = 0; j < xt.size(); ++j) {
    const double h = 1e-3 * (1.0 + std::abs(x[j]));
    xt[j] = x[j] + 2.0 * h;
    problem.residual(xt, f1);
    xt[j] = x[j] + h;
    problem.residual(xt, f2);
    xt[j] = x[j] - h;
    problem.residual(xt, f3);
    xt[j] = x[j] - 2.0 * h;
    problem.residual(xt, f4);
    xt[j] = x[j];
    for (std::size_t i = 0; i < f1.size(); ++i) {
      const double fd = (8.0 * (f2[i] - f3[i]) - (f1[i] - f4[i])) / (12.0 * h);
      const double e = relativeDifference(dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), fd, floor);
      if (e > out.maxRelativeError) out = {e, i, j};
    }
  }
  return out;
}

/// max |a - b|_inf / max(|b|_inf, tiny) per column.
inline double columnRelativeError(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    ref = std::max(ref, std::abs(b[i]));
  }
  return diff / std::max(ref, 1e-300);
}

/// Relative error of each Tangent parameter column against central
/// differences of the residual with h = 1e-6 (1 + |p|).
inline std::vector<double> checkParameterTangentFd(ThermoElectricProblem& problem, std::span<const double> x,
                                                   const std::vector<std::string>& names) {
  std::vector<double> f, fp, fm;
  MultiVector dfdp;
  problem.tangent(x, names, nullptr, f, dfdp);
  ParameterLibrary& params = problem.parameters();
  std::vector<double> errors;
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double p = params.getValue(names[k]);
    const double h = 1e-6 * (1.0 + std::abs(p));
    params.setValue(names[k], p + h);
    problem.residual(x, fp);
    params.setValue(names[k], p - h);
    problem.residual(x, fm);
    params.setValue(names[k], p);
    std::vector<double> fd(fp.size());
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (fp[i] - fm[i]) / (2.0 * h);
    errors.push_back(columnRelativeError(dfdp.col(k), fd));
  }
  return errors;
}

/// Relative error of the Tangent direction columns against J v.
inline double checkDirectionalTangent(ThermoElectricProblem& problem, std::span<const double> x,
                                      const MultiVector& directions) {
  std::vector<double> f;
  MultiVector dfdv;
  problem.tangent(x, {}, &directions, f, dfdv);
  CsrMatrix jac;
  problem.jacobian(x, f, jac);
  double worst = 0.0;
  std::vector<double> jv(x.size());
  for (std::size_t c = 0; c < directions.cols(); ++c) {
    jac.multiply(directions.col(c), jv);
    worst = std::max(worst, columnRelativeError(dfdv.col(c), jv));
  }
  return worst;
}

/// ShapeTangent columns against central differences of the residual at
/// fixed state across morph(p +- h e_k), h = 1e-6 (1 + |p_k|).
inline std::vector<double> checkShapeTangentFd(ThermoElectricProblem& problem, const SliderMorph& morph,
                                               std::span<const double> x, std::span<const double> p) {
  std::vector<double> f, fp, fm;
  MultiVector dfdp;
  problem.setMesh(morph.morph(p));
  problem.shapeTangent(x, morph.sensitivity(p), f, dfdp);
  std::vector<double> q(p.begin(), p.end());
  std::vector<double> errors;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double h = 1e-6 * (1.0 + std::abs(p[k]));
    q[k] = p[k] + h;
    problem.setMesh(morph.morph(q));
    problem.residual(x, fp);
    q[k] = p[k] - h;
    problem.setMesh(morph.morph(q));
    problem.residual(x, fm);
    q[k] = p[k];
    std::vector<double> fd(fp.size());
    for (std::size_t i = 0; i < fd.size(); ++i) fd[i] = (fp[i] - fm[i]) / (2.0 * h);
    errors.push_back(columnRelativeError(dfdp.col(k), fd));
  }
  problem.setMesh(morph.morph(p));
  return errors;
}

struct ReducedGradientCheck {
  std::vector<double> analytic;
  std::vector<double> fd;
  double maxRelativeError = 0.0;
};

/// Reduced gradient against central differences of p -> g(solve(morph(p))).
inline ReducedGradientCheck checkReducedGradientFd(ShapeObjective& objective, std::span<const double> p,
                                                   double h = 1e-4) {
  ReducedGradientCheck out;
  out.analytic = objective.evaluate(p).gradient;
  std::vector<double> q(p.begin(), p.end());
  for (std::size_t k = 0; k < q.size(); ++k) {
    q[k] = p[k] + h;
    const double gp = objective.value(q);
    q[k] = p[k] - h;
    const double gm = objective.value(q);
    q[k] = p[k];
    out.fd.push_back((gp - gm) / (2.0 * h));
    out.maxRelativeError =
        std::max(out.maxRelativeError, relativeDifference(out.analytic[k], out.fd.back(), 1e-300));
  }
  return out;
}

/// sin(pi x) sin(pi y)
inline double manufacturedTemperature(double x, double y) {
  return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
}

struct MmsLevel {
  std::size_t elementsPerSide = 0;
  double h = 0.0;
  double l2Error = 0.0;
  std::size_t newtonIterations = 0;
};

struct MmsStudy {
  std::vector<MmsLevel> levels;
  std::vector<double> orders;  // between consecutive levels
};

/// L2 norm of T_h - T_exact with a 3x3 Gauss rule per element.
inline double temperatureL2Error(const Mesh& mesh, std::span<const double> x) {
  const BasisSet rule = bilinearBasis(3);
  double sum = 0.0;
  for (const auto& nodes : mesh.connectivity) {
    for (std::size_t q = 0; q < rule.numQP(); ++q) {
      double px = 0.0, py = 0.0, th = 0.0, j00 = 0.0, j01 = 0.0, j10 = 0.0, j11 = 0.0;
      for (std::size_t i = 0; i < BasisSet::numNodes; ++i) {
        const auto& c = mesh.coords[nodes[i]];
        const double phi = rule.value(i, q);
        px += phi * c[0];
        py += phi * c[1];
        th += phi * x[2 * nodes[i] + 1];
        j00 += c[0] * rule.refGradient(i, q, 0);
        j01 += c[0] * rule.refGradient(i, q, 1);
        j10 += c[1] * rule.refGradient(i, q, 0);
        j11 += c[1] * rule.refGradient(i, q, 1);
      }
      const double e = th - manufacturedTemperature(px, py);
      sum += e * e * (j00 * j11 - j01 * j10) * rule.weights[q];
    }
  }
  return std::sqrt(sum);
}

/// Heat equation alone (no Joule source) on the unit square with the
/// manufactured solution sin(pi x) sin(pi y), zero Dirichlet data for both
/// fields, default conductor material.
inline MmsStudy manufacturedSolutionStudy(const std::vector<std::size_t>& sizes) {
  MmsStudy out;
  for (std::size_t n : sizes) {
    ProblemOptions o;
    o.jouleHeating = false;
    o.manufacturedSource = true;
    o.dirichlet.clear();
    for (std::size_t eq = 0; eq < 2; ++eq)
      for (const char* set : {"left", "right", "bottom", "top"}) o.dirichlet.push_back({eq, set, 0.0});
    ThermoElectricProblem problem(buildRectangleMesh(1.0, 1.0, n, n), o);
    const NewtonResult r = newtonSolve(problem, problem.initialGuess());
    out.levels.push_back({n, 1.0 / static_cast<double>(n), temperatureL2Error(problem.mesh(), r.x), r.iterations});
  }
  for (std::size_t i = 1; i < out.levels.size(); ++i)
    out.orders.push_back(std::log(out.levels[i - 1].l2Error / out.levels[i].l2Error) /
                         std::log(out.levels[i - 1].h / out.levels[i].h));
  return out;
}

struct SgNispComparison {
  std::vector<double> sg;    // T_Max coefficients from the intrusive solve
  std::vector<double> nisp;  // projected coefficients
  std::vector<double> coefficientRelativeError;
  double normalizedError = 0.0;  // max_k |sg_k - nisp_k| / max_k |nisp_k|
  std::size_t sgIterations = 0;
};

/// Compares the T_Max expansion of an intrusive solution with NISP using
/// `quadOrder` nodes.
inline SgNispComparison compareWithNisp(ThermoElectricProblem& problem, const BasisData& basis, const SGResult& sg,
                                        const std::map<std::string, std::vector<double>>& uncertain,
                                        std::size_t quadOrder) {
  SgNispComparison out;
  out.sgIterations = sg.iterations;
  const std::size_t dof = objectiveMaxTemperature(sg.x[0]).dof;
  for (std::size_t k = 0; k < basis.size(); ++k) out.sg.push_back(sg.x[k][dof]);
  out.nisp = nispOracle(problem, basis, uncertain, quadOrder).front();
  double scale = 0.0;
  for (double c : out.nisp) scale = std::max(scale, std::abs(c));
  for (std::size_t k = 0; k < out.sg.size(); ++k) {
    const double d = std::abs(out.sg[k] - out.nisp[k]);
    out.coefficientRelativeError.push_back(d / std::max(std::abs(out.nisp[k]), 1e-300));
    out.normalizedError = std::max(out.normalizedError, d / scale);
  }
  return out;
}

/// Intrusive SG solve of degree `degree` against NISP with `quadOrder`
/// nodes for the maximum temperature.
inline SgNispComparison compareSgNisp(ThermoElectricProblem& problem, std::size_t degree, std::size_t quadOrder,
                                      const std::map<std::string, std::vector<double>>& uncertain) {
  auto basis = buildBasisData(degree);
  const SGResult sg = sgNewtonSolve(problem, basis, uncertain);
  return compareWithNisp(problem, *basis, sg, uncertain, quadOrder);
}

}  // namespace genfe
