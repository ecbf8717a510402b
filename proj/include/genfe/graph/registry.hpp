#pragma once

#include <functional>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "genfe/error.hpp"
#include "genfe/graph/graph.hpp"

namespace genfe {

namespace detail {
template <class List>
struct MakerTuple;
template <class... T>
struct MakerTuple<TypeList<T...>> {
  using type = std::tuple<std::function<std::unique_ptr<Evaluator<T>>()>...>;
};
template <class List>
struct GraphTuple;
template <class... T>
struct GraphTuple<TypeList<T...>> {
  using type = std::tuple<std::unique_ptr<EvaluatorGraph<T>>...>;
};
}  // namespace detail

/// Builds one evaluator for any evaluation type it supports.
///
/// A generic registrar comes from a single class template instantiated for
/// every evaluation type; a specialized one has hand-written per-type
/// builders (gather and scatter).
class Registrar {
 public:
  explicit Registrar(std::string name, bool generic = false) : name_(std::move(name)), generic_(generic) {}

  const std::string& name() const { return name_; }
  bool generic() const { return generic_; }

  template <class EvalT>
  Registrar& set(std::function<std::unique_ptr<Evaluator<EvalT>>()> maker) {
    std::get<std::function<std::unique_ptr<Evaluator<EvalT>>()>>(makers_) = std::move(maker);
    return *this;
  }

  template <class EvalT>
  bool supports() const {
    return static_cast<bool>(std::get<std::function<std::unique_ptr<Evaluator<EvalT>>()>>(makers_));
  }

  template <class EvalT>
  std::unique_ptr<Evaluator<EvalT>> build() const {
    const auto& maker = std::get<std::function<std::unique_ptr<Evaluator<EvalT>>()>>(makers_);
    if (!maker)
      throw UsageError("registrar '" + name_ + "' has no specialization for evaluation type " +
                       evalTagName(EvalT::tag));
    return maker();
  }

 private:
  std::string name_;
  bool generic_;
  typename detail::MakerTuple<AllEvaluationTypes>::type makers_;
};

namespace detail {
template <template <class> class E, class... Args, class... T>
void fillGeneric(Registrar& r, TypeList<T...>, const std::tuple<Args...>& args) {
  (r.set<T>([args]() -> std::unique_ptr<Evaluator<T>> {
     return std::apply([](const auto&... a) { return std::make_unique<E<T>>(a...); }, args);
   }),
   ...);
}
}  // namespace detail

/// Registrar for class template E, constructed with copies of `args` for
/// every evaluation type.
template <template <class> class E, class... Args>
Registrar makeRegistrar(std::string name, Args... args) {
  Registrar r(std::move(name), true);
  detail::fillGeneric<E>(r, AllEvaluationTypes{}, std::tuple<Args...>(std::move(args)...));
  return r;
}

/// One independent evaluator graph per evaluation type.
class GraphSet {
 public:
  template <class EvalT>
  bool has() const {
    return std::get<std::unique_ptr<EvaluatorGraph<EvalT>>>(graphs_) != nullptr;
  }

  bool has(EvalTag tag) const {
    bool found = false;
    dispatchEvalTag(tag, [&](auto t) { found = has<decltype(t)>(); });
    return found;
  }

  template <class EvalT>
  EvaluatorGraph<EvalT>& get() {
    auto& g = std::get<std::unique_ptr<EvaluatorGraph<EvalT>>>(graphs_);
    if (!g) throw UsageError(std::string("no graph instantiated for evaluation type ") + evalTagName(EvalT::tag));
    return *g;
  }

  template <class EvalT>
  void set(std::unique_ptr<EvaluatorGraph<EvalT>> g) {
    std::get<std::unique_ptr<EvaluatorGraph<EvalT>>>(graphs_) = std::move(g);
  }

 private:
  typename detail::GraphTuple<AllEvaluationTypes>::type graphs_;
};

/// Instantiates every registrar for each requested evaluation type and
/// finalizes one graph per type. `setup` may add type-specific externals
/// before finalization.
inline GraphSet instantiateForAllTypes(const std::vector<Registrar>& registrars, const std::vector<EvalTag>& types,
                                       const std::vector<FieldRequest>& requiredOutputs,
                                       const std::vector<FieldTag>& externals = {}) {
  GraphSet set;
  for (EvalTag tag : types) {
    const bool known = dispatchEvalTag(tag, [&](auto t) {
      using EvalT = decltype(t);
      auto g = std::make_unique<EvaluatorGraph<EvalT>>();
      for (const auto& r : registrars) g->registerEvaluator(r.template build<EvalT>());
      for (const auto& e : externals) g->registerExternalField(e);
      for (const auto& req : requiredOutputs) g->requireField(req);
      g->finalize();
      set.set<EvalT>(std::move(g));
    });
    if (!known) {
      const std::string who = registrars.empty() ? std::string("(none)") : registrars.front().name();
      throw UsageError("registrar '" + who + "' cannot build unknown evaluation type #" +
                       std::to_string(static_cast<int>(tag)));
    }
  }
  return set;
}

}  // namespace genfe
