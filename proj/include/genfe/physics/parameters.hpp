#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "genfe/error.hpp"
#include "genfe/graph/evaluation_types.hpp"
#include "genfe/scalars.hpp"

namespace genfe {

/// String-keyed model parameters with push semantics: setting a value
/// writes it into every evaluator slot bound to the name, converted to the
/// slot's evaluation type.
///
/// Under Tangent, the parameters selected by seedTangent() carry unit
/// derivative seeds. Under the stochastic Galerkin types, a parameter with
/// an expansion is pushed as that expansion.
class ParameterLibrary {
 public:
  void registerParameter(const std::string& name, double initial) {
    if (frozen_) throw UsageError("parameter '" + name + "' registered after the library was frozen");
    if (index_.count(name)) throw UsageError("parameter '" + name + "' is already registered");
    index_[name] = entries_.size();
    entries_.push_back(Entry{name, initial});
  }

  /// Ends the construction phase.
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& e : entries_) out.push_back(e.name);
    return out;
  }
  bool has(const std::string& name) const { return index_.count(name) > 0; }

  double getValue(const std::string& name) const { return entry(name).value; }

  void setValue(const std::string& name, double v) {
    Entry& e = entry(name);
    e.value = v;
    push(e);
  }

  /// Attaches an evaluator's parameter slot and writes the current value.
  template <class EvalT>
  void bind(const std::string& name, typename EvalT::ScalarT* slot) {
    Entry& e = entry(name);
    e.slots[static_cast<std::size_t>(EvalT::tag)].push_back(slot);
    push(e);
  }

  /// Seeds parameter names[k] with derivative e_k of the given width in all
  /// Tangent slots; every other parameter becomes a constant.
  void seedTangent(const std::vector<std::string>& active, std::size_t width) {
    if (active.size() > width) throw UsageError("tangent width smaller than the number of seeded parameters");
    for (auto& e : entries_) e.tangentSeed.reset();
    for (std::size_t k = 0; k < active.size(); ++k) entry(active[k]).tangentSeed = TangentSeed{k, width};
    for (auto& e : entries_) push(e);
  }
  void clearTangentSeeds() { seedTangent({}, 0); }

  /// Basis used by every stochastic expansion.
  void setStochasticBasis(std::shared_ptr<const BasisData> basis) {
    basis_ = std::move(basis);
    for (auto& e : entries_) {
      e.expansion.clear();
      push(e);
    }
  }
  const std::shared_ptr<const BasisData>& stochasticBasis() const { return basis_; }

  /// Random parameter sum_k c_k P_k(xi); the deterministic value is left as is.
  void setExpansion(const std::string& name, std::vector<double> coeffs) {
    if (!basis_) throw UsageError("setExpansion('" + name + "') needs a stochastic basis");
    if (coeffs.size() > basis_->size()) throw UsageError("expansion of '" + name + "' exceeds the basis size");
    Entry& e = entry(name);
    e.expansion = std::move(coeffs);
    push(e);
  }
  void clearExpansion(const std::string& name) {
    Entry& e = entry(name);
    e.expansion.clear();
    push(e);
  }
  std::vector<double> expansion(const std::string& name) const { return entry(name).expansion; }

 private:
  struct TangentSeed {
    std::size_t index;
    std::size_t width;
  };
  struct Entry {
    std::string name;
    double value = 0.0;
    std::optional<TangentSeed> tangentSeed;
    std::vector<double> expansion;
    std::array<std::vector<void*>, kNumEvalTags> slots;
  };

  Entry& entry(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return entries_[it->second];
  }
  const Entry& entry(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter '" + name + "'");
    return entries_[it->second];
  }

  Pce sgValue(const Entry& e) const {
    if (e.expansion.empty() || !basis_) return Pce(e.value);
    return Pce(*basis_, e.expansion);
  }

  template <class EvalT>
  typename EvalT::ScalarT convert(const Entry& e) const {
    using S = typename EvalT::ScalarT;
    if constexpr (EvalT::tag == EvalTag::Tangent) {
      if (e.tangentSeed) return Dual::seeded(e.value, e.tangentSeed->width, e.tangentSeed->index);
      return Dual(e.value);
    } else if constexpr (EvalT::tag == EvalTag::SGResidual || EvalT::tag == EvalTag::SGJacobian) {
      return S(sgValue(e));
    } else {
      return S(e.value);
    }
  }

  template <class... T>
  void pushAll(Entry& e, TypeList<T...>) {
    (
        [&] {
          const auto v = convert<T>(e);
          for (void* s : e.slots[static_cast<std::size_t>(T::tag)]) *static_cast<typename T::ScalarT*>(s) = v;
        }(),
        ...);
  }

  void push(Entry& e) { pushAll(e, AllEvaluationTypes{}); }

 private:
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t> index_;
  std::shared_ptr<const BasisData> basis_;
  bool frozen_ = false;
};

}  // namespace genfe
