#pragma once

#include <cstddef>

namespace genfe {

struct AssemblyContext;

/// A region-homogeneous, contiguous block of elements processed together.
/// Local cell c of the workset is global element firstElement + c.
struct Workset {
  std::size_t index = 0;
  std::size_t firstElement = 0;
  std::size_t numElements = 0;
  int region = 0;
  AssemblyContext* context = nullptr;
};

}  // namespace genfe
