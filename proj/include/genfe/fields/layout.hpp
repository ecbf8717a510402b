#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "genfe/error.hpp"

namespace genfe {

/// Named dimensions of element-local arrays.
enum class Dim { Cell, Node, QuadPoint, Equation, Space, Dummy };

inline const char* dimName(Dim d) {
  switch (d) {
    case Dim::Cell: return "Cell";
    case Dim::Node: return "Node";
    case Dim::QuadPoint: return "QP";
    case Dim::Equation: return "Eq";
    case Dim::Space: return "Dim";
    case Dim::Dummy: return "Dummy";
  }
  return "?";
}

/// Ordered extents of a field. Storage is row-major with the last index
/// fastest.
class Layout {
 public:
  struct Extent {
    Dim dim;
    std::size_t size;
    bool operator==(const Extent&) const = default;
  };

  Layout() = default;
  Layout(std::initializer_list<Extent> extents) : extents_(extents) { validate(); }
  explicit Layout(std::vector<Extent> extents) : extents_(std::move(extents)) { validate(); }

  std::size_t rank() const { return extents_.size(); }
  std::size_t extent(std::size_t i) const { return extents_.at(i).size; }
  Dim dim(std::size_t i) const { return extents_.at(i).dim; }
  const std::vector<Extent>& extents() const { return extents_; }

  std::size_t size() const {
    return std::accumulate(extents_.begin(), extents_.end(), std::size_t{1},
                           [](std::size_t acc, const Extent& e) { return acc * e.size; });
  }

  /// Row-major offset of a multi-index. Bounds are checked.
  std::size_t offset(std::span<const std::size_t> index) const {
    if (index.size() != extents_.size()) throw UsageError("layout rank mismatch in index");
    std::size_t linear = 0;
    for (std::size_t i = 0; i < extents_.size(); ++i) {
      if (index[i] >= extents_[i].size) throw UsageError("field index out of bounds");
      linear = linear * extents_[i].size + index[i];
    }
    return linear;
  }

  std::string str() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < extents_.size(); ++i)
      os << (i ? "," : "") << dimName(extents_[i].dim) << ":" << extents_[i].size;
    os << ")";
    return os.str();
  }

  bool operator==(const Layout&) const = default;

 private:
  void validate() const {
    for (const auto& e : extents_)
      if (e.size == 0) throw UsageError("layout extents must be >= 1");
  }

  std::vector<Extent> extents_;
};

/// Linear offset of `index` in `layout`.
inline std::size_t fieldIndex(const Layout& layout, std::initializer_list<std::size_t> index) {
  return layout.offset(std::span<const std::size_t>(index.begin(), index.size()));
}

}  // namespace genfe
