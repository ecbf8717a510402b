#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "genfe/analysis/linear_solvers.hpp"
#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/error.hpp"
#include "genfe/physics/problem.hpp"

namespace genfe {

struct NewtonConfig {
  double absTol = 1e-10;
  double relTol = 1e-12;
  std::size_t maxIters = 25;
  std::size_t maxBacktracks = 8;
  LinearSolverConfig linear;
};

struct NewtonResult {
  std::vector<double> x;
  std::vector<double> history;  // residual 2-norm after each accepted iterate
  std::size_t iterations = 0;
  bool converged = false;
};

/// Residual and Jacobian callbacks of a square nonlinear system.
struct NonlinearSystem {
  std::function<void(std::span<const double>, std::vector<double>&)> residual;
  std::function<void(std::span<const double>, std::vector<double>&, CsrMatrix&)> jacobian;
};

inline NonlinearSystem systemOf(ThermoElectricProblem& problem) {
  return {[&problem](std::span<const double> x, std::vector<double>& f) { problem.residual(x, f); },
          [&problem](std::span<const double> x, std::vector<double>& f, CsrMatrix& j) { problem.jacobian(x, f, j); }};
}

/// Newton's method with step halving when the trial state is nonphysical
/// or does not reduce the residual norm. Throws SolverError when the
/// iteration limit is reached or no step can be found.
inline NewtonResult newtonSolve(const NonlinearSystem& system, std::vector<double> x0, const NewtonConfig& config = {}) {
  NewtonResult out;
  out.x = std::move(x0);
  std::vector<double> f, trialF, dx(out.x.size()), trial(out.x.size());
  CsrMatrix jac;
  system.jacobian(out.x, f, jac);
  double norm = norm2(f);
  out.history.push_back(norm);
  const double target = std::max(config.absTol, config.relTol * norm);
  while (norm > target) {
    if (out.iterations == config.maxIters)
      throw SolverError("Newton did not converge in " + std::to_string(config.maxIters) + " iterations (residual " +
                        std::to_string(norm) + ")");
    for (auto& v : f) v = -v;
    LinearSolver(jac, config.linear).solve(f, dx);
    double step = 1.0;
    bool accepted = false;
    for (std::size_t b = 0; b <= config.maxBacktracks && !accepted; ++b, step *= 0.5) {
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.x[i] + step * dx[i];
      try {
        system.residual(trial, trialF);
      } catch (const NonphysicalStateError&) {
        continue;
      } catch (const DomainError&) {
        continue;
      }
      const double trialNorm = norm2(trialF);
      if (std::isfinite(trialNorm) && (trialNorm < norm || trialNorm <= target)) accepted = true;
    }
    if (!accepted)
      throw SolverError("Newton line search failed at iteration " + std::to_string(out.iterations + 1) +
                        " (residual " + std::to_string(norm) + ")");
    out.x = trial;
    ++out.iterations;
    system.jacobian(out.x, f, jac);
    norm = norm2(f);
    out.history.push_back(norm);
  }
  out.converged = true;
  return out;
}

inline NewtonResult newtonSolve(ThermoElectricProblem& problem, std::vector<double> x0,
                                const NewtonConfig& config = {}) {
  return newtonSolve(systemOf(problem), std::move(x0), config);
}

/// Solution of the model with the conductivity frozen at sigma0, from the
/// zero state. Used to start the coupled iteration.
inline NewtonResult frozenConductivitySolve(ThermoElectricProblem& problem, const NewtonConfig& config = {}) {
  const bool saved = problem.conductivityFeedback();
  problem.setConductivityFeedback(false);
  try {
    auto r = newtonSolve(problem, problem.initialGuess(), config);
    problem.setConductivityFeedback(saved);
    return r;
  } catch (...) {
    problem.setConductivityFeedback(saved);
    throw;
  }
}

inline std::vector<double> frozenConductivityGuess(ThermoElectricProblem& problem, const NewtonConfig& config = {}) {
  return frozenConductivitySolve(problem, config).x;
}

/// Coupled solve from the frozen-conductivity state.
inline NewtonResult solveState(ThermoElectricProblem& problem, const NewtonConfig& config = {}) {
  return newtonSolve(problem, frozenConductivityGuess(problem, config), config);
}

/// Order estimate log(r_k+1 / r_k) / log(r_k / r_k-1) from the last three
/// entries of a residual history above `floor` times its first entry
/// (smaller entries are round-off).
inline double terminalConvergenceOrder(const std::vector<double>& history, double floor = 1e-12) {
  std::vector<double> h;
  for (double r : history)
    if (r > floor * history.front()) h.push_back(r);
  if (h.size() < 3) return 0.0;
  const std::size_t n = h.size();
  return std::log(h[n - 1] / h[n - 2]) / std::log(h[n - 2] / h[n - 3]);
}

}  // namespace genfe
