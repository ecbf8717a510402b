#pragma once

#include <cstddef>
#include <string>

#include "genfe/scalars.hpp"

namespace genfe {

/// Closed set of evaluation types. Each binds the scalar used for
/// solution-dependent quantities (ScalarT) and the one used for
/// coordinate-dependent quantities (MeshScalarT).
enum class EvalTag { Residual, Jacobian, Tangent, ShapeTangent, SGResidual, SGJacobian };
inline constexpr std::size_t kNumEvalTags = 6;

inline const char* evalTagName(EvalTag t) {
  switch (t) {
    case EvalTag::Residual: return "Residual";
    case EvalTag::Jacobian: return "Jacobian";
    case EvalTag::Tangent: return "Tangent";
    case EvalTag::ShapeTangent: return "ShapeTangent";
    case EvalTag::SGResidual: return "SGResidual";
    case EvalTag::SGJacobian: return "SGJacobian";
  }
  return "Unknown";
}

namespace eval {

/// f
struct Residual {
  static constexpr EvalTag tag = EvalTag::Residual;
  using ScalarT = double;
  using MeshScalarT = double;
};

/// f and df/dx
struct Jacobian {
  static constexpr EvalTag tag = EvalTag::Jacobian;
  using ScalarT = Dual;
  using MeshScalarT = double;
};

/// df/dp for model parameters and (df/dx) v for seed directions v
struct Tangent {
  static constexpr EvalTag tag = EvalTag::Tangent;
  using ScalarT = Dual;
  using MeshScalarT = double;
};

/// (df/dX) X_p: coordinates carry derivatives with respect to shape parameters
struct ShapeTangent {
  static constexpr EvalTag tag = EvalTag::ShapeTangent;
  using ScalarT = Dual;
  using MeshScalarT = Dual;
};

/// stochastic Galerkin residual
struct SGResidual {
  static constexpr EvalTag tag = EvalTag::SGResidual;
  using ScalarT = Pce;
  using MeshScalarT = double;
};

/// stochastic Galerkin residual and Jacobian blocks
struct SGJacobian {
  static constexpr EvalTag tag = EvalTag::SGJacobian;
  using ScalarT = NestedDual;
  using MeshScalarT = double;
};

}  // namespace eval

template <class... T>
struct TypeList {};

using AllEvaluationTypes =
    TypeList<eval::Residual, eval::Jacobian, eval::Tangent, eval::ShapeTangent, eval::SGResidual, eval::SGJacobian>;

/// Calls f(EvalT{}) for the evaluation type matching `tag`; returns false
/// for a tag outside the enumeration.
template <class F>
bool dispatchEvalTag(EvalTag tag, F&& f) {
  switch (tag) {
    case EvalTag::Residual: f(eval::Residual{}); return true;
    case EvalTag::Jacobian: f(eval::Jacobian{}); return true;
    case EvalTag::Tangent: f(eval::Tangent{}); return true;
    case EvalTag::ShapeTangent: f(eval::ShapeTangent{}); return true;
    case EvalTag::SGResidual: f(eval::SGResidual{}); return true;
    case EvalTag::SGJacobian: f(eval::SGJacobian{}); return true;
  }
  return false;
}

}  // namespace genfe
