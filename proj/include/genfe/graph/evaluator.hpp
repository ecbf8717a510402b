#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "genfe/error.hpp"
#include "genfe/fields.hpp"
#include "genfe/graph/evaluation_types.hpp"
#include "genfe/graph/workset.hpp"

namespace genfe {

template <class EvalT>
using ArenaFor = FieldArena<typename EvalT::ScalarT, typename EvalT::MeshScalarT>;

template <class EvalT, ScalarKind K>
using KindScalar = typename ArenaFor<EvalT>::template scalar_of<K>;

/// Handle to a field in the graph's arena; bound when the graph is finalized.
template <class EvalT, ScalarKind K>
class FieldRef {
 public:
  using scalar_type = KindScalar<EvalT, K>;

  const FieldTag& tag() const { return tag_; }
  bool bound() const { return field_ != nullptr; }

  Field<scalar_type>& field() { return *field_; }
  const Field<scalar_type>& field() const { return *field_; }

  template <class... I>
  scalar_type& operator()(I... i) {
    return (*field_)(i...);
  }
  template <class... I>
  const scalar_type& operator()(I... i) const {
    return (*field_)(i...);
  }

  std::size_t extent(std::size_t i) const { return tag_.layout.extent(i); }

 private:
  template <class>
  friend class Evaluator;

  FieldTag tag_;
  Field<scalar_type>* field_ = nullptr;
};

template <class EvalT>
using ScalarRef = FieldRef<EvalT, ScalarKind::Scalar>;
template <class EvalT>
using MeshRef = FieldRef<EvalT, ScalarKind::Mesh>;
template <class EvalT>
using RealRef = FieldRef<EvalT, ScalarKind::Real>;

/// One kernel of the compute graph. Subclasses declare the fields they read
/// (dependsOn) and write (evaluates) in their constructor and implement
/// evaluate() over one workset.
template <class EvalT>
class Evaluator {
 public:
  using EvaluationType = EvalT;
  using ScalarT = typename EvalT::ScalarT;
  using MeshScalarT = typename EvalT::MeshScalarT;
  using Arena = ArenaFor<EvalT>;

  explicit Evaluator(std::string name) : name_(std::move(name)) {}
  virtual ~Evaluator() = default;
  Evaluator(const Evaluator&) = delete;
  Evaluator& operator=(const Evaluator&) = delete;

  const std::string& name() const { return name_; }
  const std::vector<FieldTag>& dependentFields() const { return dependent_; }
  const std::vector<FieldTag>& evaluatedFields() const { return evaluated_; }

  /// Resolves every declared field handle against the arena.
  void bindFields(Arena& arena) {
    for (auto& b : binders_) b(arena);
    postRegistration(arena);
  }

  virtual void evaluate(const Workset& ws) = 0;

 protected:
  /// Hook for evaluators that need more than their declared handles.
  virtual void postRegistration(Arena&) {}

  template <ScalarKind K>
  void dependsOn(FieldRef<EvalT, K>& ref, std::string name, Layout layout) {
    ref.tag_ = FieldTag{std::move(name), std::move(layout), K};
    dependent_.push_back(ref.tag_);
    addBinder(ref);
  }

  template <ScalarKind K>
  void evaluates(FieldRef<EvalT, K>& ref, std::string name, Layout layout) {
    ref.tag_ = FieldTag{std::move(name), std::move(layout), K};
    evaluated_.push_back(ref.tag_);
    addBinder(ref);
  }

  /// Declares an output that carries no data (e.g. the scatter marker).
  void evaluatesMarker(std::string name) {
    evaluated_.push_back(FieldTag{std::move(name), Layout{{Dim::Dummy, 1}}, ScalarKind::Real});
  }

 private:
  template <ScalarKind K>
  void addBinder(FieldRef<EvalT, K>& ref) {
    binders_.push_back([&ref](Arena& arena) { ref.field_ = &arena.template get<K>(ref.tag_.name); });
  }

  std::string name_;
  std::vector<FieldTag> dependent_;
  std::vector<FieldTag> evaluated_;
  std::vector<std::function<void(Arena&)>> binders_;
};

}  // namespace genfe
