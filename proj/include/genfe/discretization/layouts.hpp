#pragma once

#include <cstddef>

#include "genfe/fields/layout.hpp"

namespace genfe {

/// Extents shared by the element-local fields of one graph.
struct ElementDims {
  std::size_t cells = 1;
  std::size_t nodes = 4;
  std::size_t qps = 4;
  std::size_t dim = 2;

  Layout nodeScalar() const { return Layout{{Dim::Cell, cells}, {Dim::Node, nodes}}; }
  Layout nodeVector() const { return Layout{{Dim::Cell, cells}, {Dim::Node, nodes}, {Dim::Space, dim}}; }
  Layout qpScalar() const { return Layout{{Dim::Cell, cells}, {Dim::QuadPoint, qps}}; }
  Layout qpVector() const { return Layout{{Dim::Cell, cells}, {Dim::QuadPoint, qps}, {Dim::Space, dim}}; }
  Layout nodeQP() const { return Layout{{Dim::Cell, cells}, {Dim::Node, nodes}, {Dim::QuadPoint, qps}}; }
  Layout nodeQPVector() const {
    return Layout{{Dim::Cell, cells}, {Dim::Node, nodes}, {Dim::QuadPoint, qps}, {Dim::Space, dim}};
  }
};

}  // namespace genfe
