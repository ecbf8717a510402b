#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "genfe/analysis/newton.hpp"
#include "genfe/analysis/sensitivity.hpp"
#include "genfe/error.hpp"

namespace genfe {

/// Hooks of a natural-continuation run: move the system to p, then solve
/// from a given state, then evaluate the response.
struct ContinuationProblem {
  std::function<void(double)> setParameter;
  std::function<NewtonResult(const std::vector<double>&)> solve;
  std::function<double(const std::vector<double>&)> response;
};

struct ContinuationPoint {
  double p = 0.0;
  double g = 0.0;
  std::size_t newtonIterations = 0;
  std::size_t bisections = 0;
};

struct ContinuationResult {
  std::vector<ContinuationPoint> points;
  std::vector<double> state;  // solution at the last completed point
  bool complete = false;
  std::string message;
};

struct ContinuationConfig {
  std::size_t maxBisections = 4;
};

/// Natural continuation over `points` uniformly spaced values from `from` to
/// `to` (both included). Each point is corrected by Newton from the previous
/// solution; a failed step is bisected up to maxBisections levels before the
/// run stops with the partial table.
inline ContinuationResult continuation(const ContinuationProblem& problem, double from, double to,
                                       std::size_t points, std::vector<double> x0,
                                       const ContinuationConfig& config = {}) {
  if (points == 0) throw ConfigError("continuation needs at least one point");
  ContinuationResult out;
  std::vector<double> x = std::move(x0);
  double current = from;
  bool started = false;

  // Reaches `target` from (current, x), bisecting on failure.
  std::function<std::size_t(double, std::size_t, std::size_t&, std::size_t&)> advance =
      [&](double target, std::size_t depth, std::size_t& iterations, std::size_t& bisections) -> std::size_t {
    problem.setParameter(target);
    try {
      NewtonResult r = problem.solve(x);
      x = std::move(r.x);
      current = target;
      iterations += r.iterations;
      return depth;
    } catch (const NumericalError&) {
      if (depth == config.maxBisections || !started) throw;
    }
    const double mid = 0.5 * (current + target);
    ++bisections;
    advance(mid, depth + 1, iterations, bisections);
    return advance(target, depth + 1, iterations, bisections);
  };

  for (std::size_t i = 0; i < points; ++i) {
    const double p = points == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
    ContinuationPoint pt{p, 0.0, 0, 0};
    try {
      advance(p, 0, pt.newtonIterations, pt.bisections);
    } catch (const NumericalError& e) {
      out.message = "continuation stopped at p = " + std::to_string(p) + ": " + e.what();
      out.state = x;
      return out;
    }
    started = true;
    pt.g = problem.response(x);
    out.points.push_back(pt);
  }
  out.state = std::move(x);
  out.complete = true;
  return out;
}

/// Continuation in a named model parameter with g = max T.
inline ContinuationProblem parameterContinuation(ThermoElectricProblem& problem, const std::string& name,
                                                 const NewtonConfig& config = {}) {
  if (!problem.parameters().has(name)) throw ConfigError("unknown continuation parameter '" + name + "'");
  return {[&problem, name](double p) { problem.parameters().setValue(name, p); },
          [&problem, config](const std::vector<double>& x) { return newtonSolve(problem, x, config); },
          [](const std::vector<double>& x) { return objectiveMaxTemperature(x).value; }};
}

/// Continuation in the first shape parameter; any further parameters are
/// held at `others`.
inline ContinuationProblem shapeContinuation(ThermoElectricProblem& problem, const SliderMorph& morph,
                                             std::vector<double> others = {}, const NewtonConfig& config = {}) {
  if (others.size() + 1 != morph.numParams())
    throw ConfigError("shape continuation: " + std::to_string(morph.numParams() - 1) + " fixed parameters expected");
  return {[&problem, &morph, others](double p) {
            std::vector<double> q{p};
            q.insert(q.end(), others.begin(), others.end());
            problem.setMesh(morph.morph(q));
          },
          [&problem, config](const std::vector<double>& x) { return newtonSolve(problem, x, config); },
          [](const std::vector<double>& x) { return objectiveMaxTemperature(x).value; }};
}

}  // namespace genfe
