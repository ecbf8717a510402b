#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/discretization/mesh.hpp"
#include "genfe/error.hpp"
#include "genfe/graph/workset.hpp"

namespace genfe {

/// Interleaved degree-of-freedom numbering: dof = node * numEq + eq.
/// Element-local unknowns are ordered the same way, local = node * numEq + eq.
class DofMap {
 public:
  DofMap() = default;
  DofMap(const Mesh& mesh, std::size_t numEq) : numNodes_(mesh.numNodes()), numEq_(numEq), conn_(mesh.connectivity) {
    if (numEq == 0) throw UsageError("DofMap needs at least one equation");
  }

  std::size_t numEq() const { return numEq_; }
  std::size_t numNodes() const { return numNodes_; }
  std::size_t numDofs() const { return numNodes_ * numEq_; }
  std::size_t numElements() const { return conn_.size(); }
  std::size_t nodesPerElement() const { return 4; }
  std::size_t localSize() const { return 4 * numEq_; }

  std::size_t dof(std::size_t node, std::size_t eq) const { return node * numEq_ + eq; }
  std::size_t node(std::size_t elem, std::size_t local) const { return conn_[elem][local]; }
  std::size_t dof(std::size_t elem, std::size_t local, std::size_t eq) const { return dof(conn_[elem][local], eq); }

  /// Sparsity of the element-graph closure: every pair of dofs sharing an element.
  CsrMatrix pattern() const {
    std::vector<std::vector<std::size_t>> rows(numDofs());
    for (const auto& c : conn_)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t ea = 0; ea < numEq_; ++ea) {
          auto& row = rows[dof(c[a], ea)];
          for (std::size_t b = 0; b < 4; ++b)
            for (std::size_t eb = 0; eb < numEq_; ++eb) row.push_back(dof(c[b], eb));
        }
    std::vector<std::size_t> ptr{0};
    std::vector<std::size_t> cols;
    for (auto& row : rows) {
      std::sort(row.begin(), row.end());
      row.erase(std::unique(row.begin(), row.end()), row.end());
      cols.insert(cols.end(), row.begin(), row.end());
      ptr.push_back(cols.size());
    }
    return CsrMatrix(numDofs(), numDofs(), std::move(ptr), std::move(cols));
  }

 private:
  std::size_t numNodes_ = 0;
  std::size_t numEq_ = 0;
  std::vector<std::array<std::size_t, 4>> conn_;
};

/// Splits the element range into region-homogeneous blocks of at most
/// worksetSize consecutive elements.
inline std::vector<Workset> buildWorksets(const Mesh& mesh, std::size_t worksetSize) {
  if (worksetSize == 0) throw ConfigError("workset size must be at least 1");
  std::vector<Workset> out;
  std::size_t e = 0;
  while (e < mesh.numElements()) {
    const int region = mesh.regionOf[e];
    std::size_t end = e;
    while (end < mesh.numElements() && end - e < worksetSize && mesh.regionOf[end] == region) ++end;
    out.push_back(Workset{out.size(), e, end - e, region, nullptr});
    e = end;
  }
  return out;
}

}  // namespace genfe
