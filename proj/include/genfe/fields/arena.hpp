#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>

#include "genfe/error.hpp"
#include "genfe/fields/field.hpp"
#include "genfe/fields/layout.hpp"

namespace genfe {

/// Which of an evaluation type's scalars a field is stored in.
enum class ScalarKind { Scalar, Mesh, Real };

inline const char* kindName(ScalarKind k) {
  switch (k) {
    case ScalarKind::Scalar: return "ScalarT";
    case ScalarKind::Mesh: return "MeshScalarT";
    case ScalarKind::Real: return "Real";
  }
  return "?";
}

/// Identity of a field inside an evaluator graph: fields are keyed by
/// (name, kind); the layout must agree between producer and consumers.
struct FieldTag {
  std::string name;
  Layout layout;
  ScalarKind kind = ScalarKind::Scalar;

  std::pair<std::string, ScalarKind> key() const { return {name, kind}; }
  std::string str() const { return name + "<" + kindName(kind) + ">" + layout.str(); }
};

/// Owns the field storage of one evaluator graph. Fields are allocated
/// once, when the graph is finalized, and reused for every workset.
template <class ScalarT, class MeshScalarT>
class FieldArena {
 public:
  template <ScalarKind K>
  using scalar_of = std::conditional_t<K == ScalarKind::Scalar, ScalarT,
                                       std::conditional_t<K == ScalarKind::Mesh, MeshScalarT, double>>;

  /// Creates the field for `tag` unless it already exists with the same layout.
  void allocate(const FieldTag& tag) {
    switch (tag.kind) {
      case ScalarKind::Scalar: allocateIn(std::get<0>(maps_), tag); break;
      case ScalarKind::Mesh: allocateIn(std::get<1>(maps_), tag); break;
      case ScalarKind::Real: allocateIn(std::get<2>(maps_), tag); break;
    }
  }

  template <ScalarKind K>
  Field<scalar_of<K>>& get(const std::string& name) {
    auto& map = std::get<static_cast<std::size_t>(K)>(maps_);
    auto it = map.find(name);
    if (it == map.end()) throw UsageError(std::string("field '") + name + "' <" + kindName(K) + "> is not allocated");
    return *it->second;
  }

  template <ScalarKind K>
  bool contains(const std::string& name) const {
    return std::get<static_cast<std::size_t>(K)>(maps_).count(name) > 0;
  }

  /// Number of field storage allocations made over the arena's lifetime.
  std::size_t allocationCount() const { return allocations_; }

 private:
  template <class Map>
  void allocateIn(Map& map, const FieldTag& tag) {
    auto it = map.find(tag.name);
    if (it != map.end()) {
      if (it->second->layout() != tag.layout)
        throw UsageError("field '" + tag.name + "' requested with layouts " + it->second->layout().str() + " and " +
                         tag.layout.str());
      return;
    }
    using F = typename Map::mapped_type::element_type;
    map.emplace(tag.name, std::make_unique<F>(tag.name, tag.layout));
    ++allocations_;
  }

  std::tuple<std::map<std::string, std::unique_ptr<Field<ScalarT>>>,
             std::map<std::string, std::unique_ptr<Field<MeshScalarT>>>,
             std::map<std::string, std::unique_ptr<Field<double>>>>
      maps_;
  std::size_t allocations_ = 0;
};

}  // namespace genfe
