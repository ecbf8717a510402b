#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <memory>
#include <string>
#include <vector>

#include "genfe/analysis/linear_solvers.hpp"
#include "genfe/analysis/newton.hpp"
#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/error.hpp"
#include "genfe/physics/problem.hpp"
#include "genfe/scalars/pce.hpp"

namespace genfe {

struct SGSolverConfig {
  double absTol = 1e-10;
  double relTol = 1e-12;
  std::size_t maxIters = 25;
  std::size_t maxBacktracks = 8;
  double gmresTolerance = 1e-12;
  std::size_t gmresRestart = 100;
  std::size_t gmresMaxIterations = 2000;
  NewtonConfig deterministic;  // for the mean-value starting state
};

struct SGResult {
  SGVector x;
  std::vector<double> history;
  std::size_t iterations = 0;
  std::size_t linearIterations = 0;
  bool converged = false;
};

/// Action of the stochastic Galerkin Jacobian: (J dX)_k = sum over the
/// product terms (i, j, w) of k of w J_i dx_j.
inline void applySGOperator(const BasisData& basis, const std::vector<CsrMatrix>& jac, const SGVector& in,
                            SGVector& out) {
  out = SGVector(in.terms(), in.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (const auto& t : basis.productTerms(k)) jac[t.i].multiplyAdd(t.weight, in[t.j], out[k]);
}

/// Block Newton on F(X) = 0 for the problem with the given random
/// parameters (coefficients on `basis`). GMRES on the block operator, with
/// the inverse of the mean matrix J_0 applied to each block as preconditioner.
/// The starting state has the deterministic solution at the mean parameter
/// values in block 0.
inline SGResult sgNewtonSolve(ThermoElectricProblem& problem, std::shared_ptr<const BasisData> basis,
                              const std::map<std::string, std::vector<double>>& uncertain,
                              const SGSolverConfig& config = {}) {
  ParameterLibrary& params = problem.parameters();
  const std::size_t terms = basis->size();
  const std::size_t n = problem.numDofs();

  std::map<std::string, double> saved;
  for (const auto& [name, coeffs] : uncertain) {
    saved[name] = params.getValue(name);
    params.setValue(name, coeffs.empty() ? 0.0 : coeffs.front());
  }
  auto restore = [&] {
    for (const auto& [name, v] : saved) params.setValue(name, v);
  };

  SGResult out;
  out.x = SGVector(terms, n);
  try {
    out.x[0] = solveState(problem, config.deterministic).x;
  } catch (...) {
    restore();
    throw;
  }
  restore();
  params.setStochasticBasis(basis);
  for (const auto& [name, coeffs] : uncertain) params.setExpansion(name, coeffs);

  SGVector f, trialF, dx(terms, n), trial;
  std::vector<CsrMatrix> jac;
  problem.sgJacobian(out.x, f, jac);
  double norm = norm2(f);
  out.history.push_back(norm);
  const double target = std::max(config.absTol, config.relTol * norm);

  auto flatten = [&](const SGVector& v, std::span<double> flat) {
    for (std::size_t k = 0; k < terms; ++k) std::copy(v[k].begin(), v[k].end(), flat.begin() + k * n);
  };
  auto unflatten = [&](std::span<const double> flat, SGVector& v) {
    v = SGVector(terms, n);
    for (std::size_t k = 0; k < terms; ++k) std::copy(flat.begin() + k * n, flat.begin() + (k + 1) * n, v[k].begin());
  };

  while (norm > target) {
    if (out.iterations == config.maxIters)
      throw SolverError("stochastic Galerkin Newton did not converge in " + std::to_string(config.maxIters) +
                        " iterations (residual " + std::to_string(norm) + ")");
    // exact J_0 inverse for small systems, ILU(0) of J_0 otherwise
    std::unique_ptr<DenseLU> meanLU;
    std::unique_ptr<Ilu0> meanIlu;
    if (n <= config.deterministic.linear.denseLimit)
      meanLU = std::make_unique<DenseLU>(jac[0]);
    else
      meanIlu = std::make_unique<Ilu0>(jac[0]);
    SGVector tmpIn, tmpOut;
    auto apply = [&](std::span<const double> in, std::span<double> res) {
      unflatten(in, tmpIn);
      applySGOperator(*basis, jac, tmpIn, tmpOut);
      flatten(tmpOut, res);
    };
    auto precondition = [&](std::span<const double> in, std::span<double> res) {
      for (std::size_t k = 0; k < terms; ++k) {
        if (meanLU)
          meanLU->solve(in.subspan(k * n, n), res.subspan(k * n, n));
        else
          meanIlu->solve(in.subspan(k * n, n), res.subspan(k * n, n));
      }
    };
    std::vector<double> rhs(terms * n), step(terms * n, 0.0);
    flatten(f, rhs);
    for (auto& v : rhs) v = -v;
    const GmresResult lin =
        gmres(apply, precondition, rhs, step, config.gmresTolerance, config.gmresRestart, config.gmresMaxIterations);
    out.linearIterations += lin.iterations;
    if (!lin.converged)
      throw SolverError("stochastic Galerkin GMRES did not converge (relative residual " +
                        std::to_string(lin.relativeResidual) + ")");
    unflatten(step, dx);

    double t = 1.0;
    bool accepted = false;
    for (std::size_t b = 0; b <= config.maxBacktracks && !accepted; ++b, t *= 0.5) {
      trial = out.x;
      for (std::size_t k = 0; k < terms; ++k)
        for (std::size_t i = 0; i < n; ++i) trial[k][i] += t * dx[k][i];
      try {
        problem.sgResidual(trial, trialF);
      } catch (const NumericalError&) {
        continue;
      }
      const double trialNorm = norm2(trialF);
      if (std::isfinite(trialNorm) && (trialNorm < norm || trialNorm <= target)) accepted = true;
    }
    if (!accepted)
      throw SolverError("stochastic Galerkin line search failed at iteration " + std::to_string(out.iterations + 1));
    out.x = trial;
    ++out.iterations;
    problem.sgJacobian(out.x, f, jac);
    norm = norm2(f);
    out.history.push_back(norm);
  }
  out.converged = true;
  return out;
}

/// Expansion of sum_k c_k P_k at the point xi.
inline double evaluateExpansion(const std::vector<double>& coeffs, double xi) {
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] * legendre(k, xi);
  return sum;
}

/// Non-intrusive spectral projection of the outputs of `model` on the basis:
/// c_k = sum_q w_q out(xi_q) P_k(xi_q) / (2 E[P_k^2]) over a Gauss-Legendre
/// rule with `quadOrder` points. Returns coefficients [output][k].
inline std::vector<std::vector<double>> nispProject(const BasisData& basis, std::size_t quadOrder,
                                                    const std::function<std::vector<double>(double)>& model) {
  const GaussLegendreRule rule = gaussLegendre(quadOrder);
  std::vector<std::vector<double>> coeffs;
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const std::vector<double> out = model(rule.nodes[q]);
    if (coeffs.empty()) coeffs.assign(out.size(), std::vector<double>(basis.size(), 0.0));
    if (out.size() != coeffs.size()) throw UsageError("nispProject: output count changed between nodes");
    for (std::size_t o = 0; o < out.size(); ++o)
      for (std::size_t k = 0; k < basis.size(); ++k)
        coeffs[o][k] += rule.weights[q] * out[o] * legendre(k, rule.nodes[q]) / (2.0 * basis.norm(k));
  }
  return coeffs;
}

/// NISP of the maximum temperature and of the temperature at `probeDof`
/// (when given) with the parameters set to their expansions at each node.
inline std::vector<std::vector<double>> nispOracle(ThermoElectricProblem& problem, const BasisData& basis,
                                                   const std::map<std::string, std::vector<double>>& uncertain,
                                                   std::size_t quadOrder, std::optional<std::size_t> probeDof = {},
                                                   const NewtonConfig& config = {}) {
  ParameterLibrary& params = problem.parameters();
  std::map<std::string, double> saved;
  for (const auto& [name, coeffs] : uncertain) saved[name] = params.getValue(name);
  auto restore = [&] {
    for (const auto& [name, v] : saved) params.setValue(name, v);
  };
  try {
    auto result = nispProject(basis, quadOrder, [&](double xi) {
      for (const auto& [name, coeffs] : uncertain) params.setValue(name, evaluateExpansion(coeffs, xi));
      const std::vector<double> x = solveState(problem, config).x;
      std::vector<double> out{objectiveMaxTemperature(x).value};
      if (probeDof) out.push_back(x.at(*probeDof));
      return out;
    });
    restore();
    return result;
  } catch (...) {
    restore();
    throw;
  }
}

}  // namespace genfe
