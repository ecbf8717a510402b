#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "genfe/analysis/linear_solvers.hpp"
#include "genfe/analysis/newton.hpp"
#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/error.hpp"
#include "genfe/morphing/morph.hpp"
#include "genfe/physics/objective.hpp"
#include "genfe/physics/problem.hpp"

namespace genfe {

/// Forward sensitivity form of the reduced gradient with dg/dp explicit = 0:
/// solve J S = f_p column by column, then dg/dp = -(dg/dx)^T S.
inline std::vector<double> reducedGradient(const CsrMatrix& jacobian, const MultiVector& fp,
                                           std::span<const double> dgdx, const LinearSolverConfig& config = {}) {
  if (fp.rows() != jacobian.rows() || dgdx.size() != jacobian.rows())
    throw UsageError("reducedGradient: size mismatch");
  std::vector<double> grad(fp.cols(), 0.0);
  bool allZero = true;
  for (double v : fp.data()) allZero = allZero && v == 0.0;
  if (allZero) return grad;
  const LinearSolver solver(jacobian, config);
  std::vector<double> s(fp.rows());
  for (std::size_t k = 0; k < fp.cols(); ++k) {
    solver.solve(fp.col(k), s);
    grad[k] = -dot(dgdx, s);
  }
  return grad;
}

/// Objective value, gradient and state of the shape problem at one p.
struct ShapeEvaluation {
  double g = 0.0;
  std::vector<double> gradient;
  std::vector<double> x;
  std::size_t newtonIterations = 0;
};

/// The maximum-temperature shape problem: p -> morph -> solve -> g, with the
/// reduced gradient from ShapeTangent assembly and the morph sensitivities.
class ShapeObjective {
 public:
  ShapeObjective(ThermoElectricProblem& problem, const SliderMorph& morph, NewtonConfig config = {})
      : problem_(&problem), morph_(&morph), config_(config) {}

  const SliderMorph& morph() const { return *morph_; }
  ThermoElectricProblem& problem() { return *problem_; }

  /// Solves the state at p. The previous state (if any) is the initial
  /// guess; on failure the solve restarts from the frozen-conductivity state.
  std::vector<double> solve(std::span<const double> p, std::size_t* iterations = nullptr) {
    problem_->setMesh(morph_->morph(p));
    NewtonResult r;
    bool done = false;
    if (!warm_.empty()) {
      try {
        r = newtonSolve(*problem_, warm_, config_);
        done = true;
      } catch (const NumericalError&) {
      }
    }
    if (!done) r = solveState(*problem_, config_);
    warm_ = r.x;
    if (iterations) *iterations = r.iterations;
    return r.x;
  }

  double value(std::span<const double> p) { return objectiveMaxTemperature(solve(p)).value; }

  ShapeEvaluation evaluate(std::span<const double> p) {
    ShapeEvaluation out;
    out.x = solve(p, &out.newtonIterations);
    const MaxTemperature g = objectiveMaxTemperature(out.x);
    out.g = g.value;
    out.gradient = gradientAt(p, out.x, g.gradient(out.x.size()));
    return out;
  }

  /// dg/dp at a converged state x for the objective gradient dgdx.
  std::vector<double> gradientAt(std::span<const double> p, std::span<const double> x, std::span<const double> dgdx) {
    const MultiVector xp = morph_->sensitivity(p);
    std::vector<double> f;
    MultiVector fp;
    problem_->shapeTangent(x, xp, f, fp);
    CsrMatrix jac;
    problem_->jacobian(x, f, jac);
    return reducedGradient(jac, fp, dgdx, config_.linear);
  }

  void resetWarmStart() { warm_.clear(); }

 private:
  ThermoElectricProblem* problem_;
  const SliderMorph* morph_;
  NewtonConfig config_;
  std::vector<double> warm_;
};

}  // namespace genfe
