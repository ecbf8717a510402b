#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/error.hpp"

namespace genfe {

enum class LinearSolverKind { Auto, DenseLU, Gmres };

struct LinearSolverConfig {
  LinearSolverKind kind = LinearSolverKind::Auto;
  std::size_t denseLimit = 2000;
  std::size_t restart = 50;
  std::size_t maxIterations = 1000;
  double tolerance = 1e-12;
};

/// Dense LU with partial pivoting of a sparse matrix.
class DenseLU {
 public:
  explicit DenseLU(const CsrMatrix& a) : lu_(a.toDense()) {
    const double rc = lu_.rcond();
    if (!(rc > 1e-15)) {
      std::ostringstream os;
      os << "singular matrix (reciprocal condition estimate " << rc << ")";
      throw SolverError(os.str());
    }
  }
  void solve(std::span<const double> b, std::span<double> x) const {
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size())) = lu_.solve(rhs);
  }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Incomplete LU factorization with the sparsity of A.
class Ilu0 {
 public:
  explicit Ilu0(const CsrMatrix& a) : a_(a) {
    const auto& ptr = a_.rowPtr();
    const auto& col = a_.colIdx();
    auto& v = a_.values();
    const std::size_t n = a_.rows();
    diag_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) diag_[i] = a_.find(i, i);
    std::vector<std::ptrdiff_t> pos(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) pos[col[k]] = static_cast<std::ptrdiff_t>(k);
      for (std::size_t k = ptr[i]; k < ptr[i + 1] && col[k] < i; ++k) {
        const std::size_t j = col[k];
        const double pivot = v[diag_[j]];
        if (pivot == 0.0) throw SolverError("zero pivot in ILU(0) at row " + std::to_string(j));
        v[k] /= pivot;
        for (std::size_t m = diag_[j] + 1; m < ptr[j + 1]; ++m)
          if (pos[col[m]] >= 0) v[static_cast<std::size_t>(pos[col[m]])] -= v[k] * v[m];
      }
      for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) pos[col[k]] = -1;
      if (v[diag_[i]] == 0.0) throw SolverError("zero pivot in ILU(0) at row " + std::to_string(i));
    }
  }

  void solve(std::span<const double> b, std::span<double> x) const {
    const auto& ptr = a_.rowPtr();
    const auto& col = a_.colIdx();
    const auto& v = a_.values();
    const std::size_t n = a_.rows();
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[i];
      for (std::size_t k = ptr[i]; k < diag_[i]; ++k) s -= v[k] * x[col[k]];
      x[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      for (std::size_t k = diag_[i] + 1; k < ptr[i + 1]; ++k) s -= v[k] * x[col[k]];
      x[i] = s / v[diag_[i]];
    }
  }

 private:
  CsrMatrix a_;
  std::vector<std::size_t> diag_;
};

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct GmresResult {
  bool converged = false;
  std::size_t iterations = 0;
  double relativeResidual = 0.0;
};

/// Right-preconditioned restarted GMRES; x holds the initial guess on entry.
inline GmresResult gmres(const LinearOperator& apply, const LinearOperator& precondition, std::span<const double> b,
                         std::span<double> x, double tol, std::size_t restart, std::size_t maxIterations) {
  const std::size_t n = b.size();
  const double bnorm = norm2(b);
  GmresResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> r(n), w(n), z(n);
  while (res.iterations < maxIterations) {
    apply(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    double beta = norm2(r);
    res.relativeResidual = beta / bnorm;
    if (res.relativeResidual <= tol) {
      res.converged = true;
      return res;
    }
    const std::size_t m = restart;
    std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> zs(m, std::vector<double>(n));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = r[i] / beta;
    g[0] = beta;
    std::size_t k = 0;
    for (; k < m && res.iterations < maxIterations; ++k) {
      ++res.iterations;
      precondition(v[k], zs[k]);
      apply(zs[k], w);
      for (std::size_t j = 0; j <= k; ++j) {
        h[j][k] = dot(w, v[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= h[j][k] * v[j][i];
      }
      h[k + 1][k] = norm2(w);
      if (h[k + 1][k] != 0.0)
        for (std::size_t i = 0; i < n; ++i) v[k + 1][i] = w[i] / h[k + 1][k];
      for (std::size_t j = 0; j < k; ++j) {
        const double t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
        h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
        h[j][k] = t;
      }
      const double denom = std::hypot(h[k][k], h[k + 1][k]);
      if (denom == 0.0) throw SolverError("GMRES breakdown");
      cs[k] = h[k][k] / denom;
      sn[k] = h[k + 1][k] / denom;
      h[k][k] = denom;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      res.relativeResidual = std::abs(g[k + 1]) / bnorm;
      if (res.relativeResidual <= tol) {
        ++k;
        break;
      }
    }
    std::vector<double> y(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
      double s = g[i];
      for (std::size_t j = i + 1; j < k; ++j) s -= h[i][j] * y[j];
      y[i] = s / h[i][i];
    }
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * zs[j][i];
    if (res.relativeResidual <= tol) {
      // confirm with the true residual
      apply(x, w);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
      res.relativeResidual = norm2(r) / bnorm;
      if (res.relativeResidual <= 10.0 * tol) {
        res.converged = true;
        return res;
      }
    }
  }
  return res;
}

/// Solves A x = b with a direct factorization for small systems and
/// ILU(0)-preconditioned GMRES otherwise.
class LinearSolver {
 public:
  LinearSolver(const CsrMatrix& a, const LinearSolverConfig& config) : a_(&a), config_(config) {
    const bool dense = config.kind == LinearSolverKind::DenseLU ||
                       (config.kind == LinearSolverKind::Auto && a.rows() <= config.denseLimit);
    if (dense)
      lu_ = std::make_unique<DenseLU>(a);
    else
      ilu_ = std::make_unique<Ilu0>(a);
  }

  void solve(std::span<const double> b, std::span<double> x) const {
    if (lu_) {
      lu_->solve(b, x);
      return;
    }
    std::fill(x.begin(), x.end(), 0.0);
    const GmresResult r = gmres([this](auto in, auto out) { a_->multiply(in, out); },
                                [this](auto in, auto out) { ilu_->solve(in, out); }, b, x, config_.tolerance,
                                config_.restart, config_.maxIterations);
    if (!r.converged) {
      std::ostringstream os;
      os << "GMRES did not converge in " << r.iterations << " iterations (relative residual " << r.relativeResidual
         << ")";
      throw SolverError(os.str());
    }
  }

 private:
  const CsrMatrix* a_;
  LinearSolverConfig config_;
  std::unique_ptr<DenseLU> lu_;
  std::unique_ptr<Ilu0> ilu_;
};

}  // namespace genfe
