#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "genfe/error.hpp"

namespace genfe {

struct OptimizerConfig {
  double tolerance = 1e-6;  // on the projected gradient norm
  double minStep = 1e-8;
  std::size_t maxIterations = 100;
  std::size_t maxBacktracks = 40;
  double armijo = 1e-4;
};

struct OptimizerIterate {
  std::vector<double> p;
  double g = 0.0;
  std::vector<double> gradient;
};

struct OptimizerResult {
  std::vector<double> p;
  double g = 0.0;
  std::vector<OptimizerIterate> history;  // accepted iterates, starting point first
  std::size_t acceptedSteps = 0;
  bool converged = false;
  bool failed = false;  // an inner evaluation threw; p is the best point so far
  std::string message;
};

/// Objective callback: value and gradient at p.
using OptimizerObjective = std::function<std::pair<double, std::vector<double>>(std::span<const double>)>;

/// Projected-gradient BFGS on the box [lower, upper] with a backtracking
/// Armijo line search. Stops when the projected gradient norm is at most
/// `tolerance` or the accepted step is shorter than `minStep`.
inline OptimizerResult optimize(const OptimizerObjective& objective, std::vector<double> p0,
                                const std::vector<double>& lower, const std::vector<double>& upper,
                                const OptimizerConfig& config = {}) {
  const std::size_t n = p0.size();
  if (lower.size() != n || upper.size() != n) throw ConfigError("optimize: bounds do not match the parameter count");
  for (std::size_t i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i])) throw ConfigError("optimize: lower bound exceeds upper bound");

  auto project = [&](Eigen::VectorXd v) {
    for (std::size_t i = 0; i < n; ++i) v(i) = std::clamp(v(i), lower[i], upper[i]);
    return v;
  };
  auto toVec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };

  OptimizerResult out;
  Eigen::VectorXd p = project(Eigen::Map<const Eigen::VectorXd>(p0.data(), static_cast<Eigen::Index>(n)));
  double g = 0.0;
  Eigen::VectorXd grad(n);
  try {
    auto [v, gr] = objective(toVec(p));
    g = v;
    grad = Eigen::Map<const Eigen::VectorXd>(gr.data(), static_cast<Eigen::Index>(n));
  } catch (const NumericalError& e) {
    throw SolverError(std::string("optimize: objective failed at the starting point: ") + e.what());
  }
  out.p = toVec(p);
  out.g = g;
  out.history.push_back({out.p, g, toVec(grad)});

  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t it = 0; it < config.maxIterations; ++it) {
    const Eigen::VectorXd pg = project(p - grad) - p;
    if (pg.norm() <= config.tolerance) {
      out.converged = true;
      out.message = "projected gradient below tolerance";
      return out;
    }
    // variables held at a bound by the gradient drop out of the step
    std::vector<bool> active(n, false);
    for (std::size_t i = 0; i < n; ++i)
      active[i] = (p(i) <= lower[i] && grad(i) > 0.0) || (p(i) >= upper[i] && grad(i) < 0.0);
    Eigen::VectorXd d = -(h * grad);
    for (std::size_t i = 0; i < n; ++i)
      if (active[i]) d(i) = 0.0;
    if (!(d.dot(grad) < 0.0)) {
      h.setIdentity();
      d = -grad;
      for (std::size_t i = 0; i < n; ++i)
        if (active[i]) d(i) = 0.0;
    }

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial, trialGrad(n);
    double trialG = 0.0;
    for (std::size_t b = 0; b < config.maxBacktracks; ++b, t *= 0.5) {
      trial = project(p + t * d);
      if ((trial - p).norm() < config.minStep) break;
      try {
        auto [v, gr] = objective(toVec(trial));
        trialG = v;
        trialGrad = Eigen::Map<const Eigen::VectorXd>(gr.data(), static_cast<Eigen::Index>(n));
      } catch (const NumericalError& e) {
        out.failed = true;
        out.message = std::string("objective evaluation failed: ") + e.what();
        return out;
      }
      if (trialG <= g + config.armijo * grad.dot(trial - p)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.converged = true;
      out.message = "step below minimum length";
      return out;
    }

    const Eigen::VectorXd s = trial - p;
    const Eigen::VectorXd y = trialGrad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      h = (id - rho * s * y.transpose()) * h * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    p = trial;
    g = trialG;
    grad = trialGrad;
    ++out.acceptedSteps;
    out.p = toVec(p);
    out.g = g;
    out.history.push_back({out.p, g, toVec(grad)});
    if (s.norm() < config.minStep) {
      out.converged = true;
      out.message = "step below minimum length";
      return out;
    }
  }
  out.message = "iteration limit reached";
  return out;
}

}  // namespace genfe
