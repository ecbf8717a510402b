#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "genfe/assembly/dof_map.hpp"
#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/discretization/mesh.hpp"

namespace genfe {

/// Fixed value for equation `eq` on every node of a node set.
struct DirichletSpec {
  std::size_t eq = 0;
  std::string nodeSet;
  double value = 0.0;
};

/// Constrained dofs sorted by id. Later specs override earlier ones on
/// shared nodes.
class DirichletSet {
 public:
  DirichletSet() = default;
  DirichletSet(const Mesh& mesh, const DofMap& dofs, const std::vector<DirichletSpec>& specs) {
    std::map<std::size_t, double> byDof;
    for (const auto& s : specs) {
      if (s.eq >= dofs.numEq()) throw ConfigError("Dirichlet condition on unknown equation " + std::to_string(s.eq));
      for (auto n : mesh.nodeSet(s.nodeSet)) byDof[dofs.dof(n, s.eq)] = s.value;
    }
    for (const auto& [d, v] : byDof) {
      dofs_.push_back(d);
      values_.push_back(v);
    }
  }

  std::size_t size() const { return dofs_.size(); }
  const std::vector<std::size_t>& dofs() const { return dofs_; }
  const std::vector<double>& values() const { return values_; }
  bool constrained(std::size_t dof) const { return std::binary_search(dofs_.begin(), dofs_.end(), dof); }

  /// x_i = g_i on constrained dofs.
  void impose(std::span<double> x) const {
    for (std::size_t k = 0; k < dofs_.size(); ++k) x[dofs_[k]] = values_[k];
  }
  void impose(SGVector& x) const {
    for (std::size_t k = 0; k < dofs_.size(); ++k) {
      x[0][dofs_[k]] = values_[k];
      for (std::size_t t = 1; t < x.terms(); ++t) x[t][dofs_[k]] = 0.0;
    }
  }
  /// Zeroes constrained entries (for Newton updates and sensitivities).
  void zero(std::span<double> v) const {
    for (auto d : dofs_) v[d] = 0.0;
  }

  /// f_i = x_i - g_i
  void applyResidual(std::span<double> f, std::span<const double> x) const {
    for (std::size_t k = 0; k < dofs_.size(); ++k) f[dofs_[k]] = x[dofs_[k]] - values_[k];
  }
  /// Row i becomes e_i.
  void applyJacobian(CsrMatrix& j) const {
    for (auto d : dofs_) j.setRowToIdentity(d);
  }
  /// Parameter columns vanish on constrained rows; direction columns carry
  /// the direction itself, the derivative of x_i - g_i.
  void applyTangent(MultiVector& dfdp, std::size_t params, const MultiVector* directions) const {
    for (auto d : dofs_)
      for (std::size_t c = 0; c < dfdp.cols(); ++c)
        dfdp(d, c) = (c < params || !directions) ? 0.0 : (*directions)(d, c - params);
  }
  void applyShapeTangent(MultiVector& dfdp) const {
    for (auto d : dofs_)
      for (std::size_t c = 0; c < dfdp.cols(); ++c) dfdp(d, c) = 0.0;
  }
  /// F_0 = x_0 - g, F_k = x_k; J_0 row e_i, J_k rows zero.
  void applySG(SGVector* f, const SGVector& x, std::vector<CsrMatrix>* j) const {
    if (f)
      for (std::size_t k = 0; k < dofs_.size(); ++k) {
        (*f)[0][dofs_[k]] = x[0][dofs_[k]] - values_[k];
        for (std::size_t t = 1; t < f->terms(); ++t) (*f)[t][dofs_[k]] = x[t][dofs_[k]];
      }
    if (j)
      for (std::size_t t = 0; t < j->size(); ++t)
        for (auto d : dofs_) (*j)[t].setRowToIdentity(d, t == 0 ? 1.0 : 0.0);
  }

 private:
  std::vector<std::size_t> dofs_;
  std::vector<double> values_;
};

}  // namespace genfe
