#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "genfe/assembly/context.hpp"
#include "genfe/discretization/evaluators.hpp"
#include "genfe/discretization/layouts.hpp"
#include "genfe/error.hpp"
#include "genfe/graph/evaluator.hpp"
#include "genfe/graph/registry.hpp"

namespace genfe {

inline const char* const kScatterMarker = "Scatter";

namespace detail {

inline const AssemblyContext& contextOf(const Workset& ws) {
  if (!ws.context) throw UsageError("workset has no assembly context");
  return *ws.context;
}

inline void checkSolutionSize(const AssemblyContext& ctx) {
  if (ctx.x.size() != ctx.dofs->numDofs())
    throw UsageError("solution vector has " + std::to_string(ctx.x.size()) + " entries, expected " +
                     std::to_string(ctx.dofs->numDofs()));
}

}  // namespace detail

/// Seed phase for the solution unknowns: builds the element-local scalar
/// of one unknown for each evaluation type.
template <class EvalT>
struct SolutionSeed;

template <>
struct SolutionSeed<eval::Residual> {
  static void check(const AssemblyContext& ctx) { detail::checkSolutionSize(ctx); }
  static double make(const AssemblyContext& ctx, std::size_t dof, std::size_t, std::size_t) { return ctx.x[dof]; }
};

template <>
struct SolutionSeed<eval::Jacobian> {
  static void check(const AssemblyContext& ctx) { detail::checkSolutionSize(ctx); }
  static Dual make(const AssemblyContext& ctx, std::size_t dof, std::size_t local, std::size_t width) {
    return Dual::seeded(ctx.x[dof], width, local);
  }
};

template <>
struct SolutionSeed<eval::Tangent> {
  static void check(const AssemblyContext& ctx) {
    detail::checkSolutionSize(ctx);
    if (ctx.directions && ctx.directions->rows() != ctx.dofs->numDofs())
      throw UsageError("direction block has wrong number of rows");
  }
  static Dual make(const AssemblyContext& ctx, std::size_t dof, std::size_t, std::size_t) {
    if (!ctx.directions || ctx.directions->cols() == 0) return Dual(ctx.x[dof]);
    Dual d(ctx.x[dof], ctx.tangentWidth());
    for (std::size_t c = 0; c < ctx.directions->cols(); ++c)
      d.fastAccessDx(ctx.tangentParams + c) = (*ctx.directions)(dof, c);
    return d;
  }
};

template <>
struct SolutionSeed<eval::ShapeTangent> {
  static void check(const AssemblyContext& ctx) { detail::checkSolutionSize(ctx); }
  static Dual make(const AssemblyContext& ctx, std::size_t dof, std::size_t, std::size_t) { return Dual(ctx.x[dof]); }
};

namespace detail {
inline void checkSG(const AssemblyContext& ctx) {
  if (!ctx.sgBasis) throw UsageError("stochastic Galerkin assembly needs a basis");
  if (ctx.sgX) {
    if (ctx.sgX->terms() != ctx.sgBasis->size() || ctx.sgX->size() != ctx.dofs->numDofs())
      throw UsageError("stochastic Galerkin solution has the wrong block shape");
  } else {
    checkSolutionSize(ctx);
  }
}

inline Pce gatherPce(const AssemblyContext& ctx, std::size_t dof) {
  Pce v = Pce::zero(*ctx.sgBasis);
  if (ctx.sgX) {
    for (std::size_t k = 0; k < ctx.sgBasis->size(); ++k) v.coeffRef(k) = (*ctx.sgX)[k][dof];
  } else {
    v.coeffRef(0) = ctx.x[dof];
  }
  return v;
}
}  // namespace detail

template <>
struct SolutionSeed<eval::SGResidual> {
  static void check(const AssemblyContext& ctx) { detail::checkSG(ctx); }
  static Pce make(const AssemblyContext& ctx, std::size_t dof, std::size_t, std::size_t) {
    return detail::gatherPce(ctx, dof);
  }
};

template <>
struct SolutionSeed<eval::SGJacobian> {
  static void check(const AssemblyContext& ctx) { detail::checkSG(ctx); }
  static NestedDual make(const AssemblyContext& ctx, std::size_t dof, std::size_t local, std::size_t width) {
    return NestedDual::seeded(detail::gatherPce(ctx, dof), width, local);
  }
};

/// Gathers the unknowns of every equation into one nodal field per
/// equation, in equation order.
template <class EvalT>
class GatherSolution : public Evaluator<EvalT> {
 public:
  GatherSolution(const ElementDims& dims, const std::vector<std::string>& names)
      : Evaluator<EvalT>("Gather Solution"), fields_(names.size()) {
    for (std::size_t k = 0; k < names.size(); ++k) this->evaluates(fields_[k], names[k], dims.nodeScalar());
  }

  void evaluate(const Workset& ws) override {
    const AssemblyContext& ctx = detail::contextOf(ws);
    SolutionSeed<EvalT>::check(ctx);
    const std::size_t neq = fields_.size();
    if (ctx.dofs->numEq() != neq) throw UsageError("gather: dof map equation count differs from gathered fields");
    const std::size_t width = 4 * neq;
    for (std::size_t c = 0; c < ws.numElements; ++c) {
      const std::size_t e = ws.firstElement + c;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < neq; ++k)
          fields_[k](c, i) = SolutionSeed<EvalT>::make(ctx, ctx.dofs->dof(e, i, k), i * neq + k, width);
    }
  }

 private:
  std::vector<ScalarRef<EvalT>> fields_;
};

/// Copies element node coordinates; under ShapeTangent also seeds their
/// derivatives from the coordinate sensitivities dX/dp.
template <class EvalT>
class GatherCoordinates : public Evaluator<EvalT> {
 public:
  explicit GatherCoordinates(const ElementDims& dims) : Evaluator<EvalT>("Gather Coordinates") {
    this->evaluates(coords_, fieldname::coordinates, dims.nodeVector());
  }

  void evaluate(const Workset& ws) override {
    const AssemblyContext& ctx = detail::contextOf(ws);
    const Mesh& mesh = *ctx.mesh;
    using M = typename EvalT::MeshScalarT;
    if constexpr (EvalT::tag == EvalTag::ShapeTangent) {
      if (!ctx.coordSensitivity) throw UsageError("ShapeTangent assembly needs coordinate sensitivities");
      if (ctx.coordSensitivity->rows() != 2 * mesh.numNodes())
        throw UsageError("coordinate sensitivities have the wrong number of rows");
    }
    for (std::size_t c = 0; c < ws.numElements; ++c) {
      const std::size_t e = ws.firstElement + c;
      for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t node = mesh.connectivity[e][i];
        for (std::size_t d = 0; d < 2; ++d) {
          if constexpr (EvalT::tag == EvalTag::ShapeTangent) {
            const MultiVector& xp = *ctx.coordSensitivity;
            M v(mesh.coords[node][d], xp.cols());
            for (std::size_t k = 0; k < xp.cols(); ++k) v.fastAccessDx(k) = xp(2 * node + d, k);
            coords_(c, i, d) = v;
          } else {
            coords_(c, i, d) = M(mesh.coords[node][d]);
          }
        }
      }
    }
  }

 private:
  MeshRef<EvalT> coords_;
};

/// Extract phase: moves one element-local residual entry into the globals.
template <class EvalT>
struct ResidualExtract;

template <>
struct ResidualExtract<eval::Residual> {
  static void put(const AssemblyContext& ctx, const double& v, std::size_t row, std::size_t, std::size_t) {
    ctx.sink->residual(row, v);
  }
};

template <>
struct ResidualExtract<eval::Jacobian> {
  static void put(const AssemblyContext& ctx, const Dual& v, std::size_t row, std::size_t elem, std::size_t neq) {
    ctx.sink->residual(row, v.val());
    for (std::size_t j = 0; j < 4 * neq; ++j) ctx.sink->jacobian(row, ctx.dofs->dof(elem, j / neq, j % neq), v.dx(j));
  }
};

template <>
struct ResidualExtract<eval::Tangent> {
  static void put(const AssemblyContext& ctx, const Dual& v, std::size_t row, std::size_t, std::size_t) {
    ctx.sink->residual(row, v.val());
    for (std::size_t k = 0; k < ctx.tangentWidth(); ++k) ctx.sink->tangent(row, k, v.dx(k));
  }
};

template <>
struct ResidualExtract<eval::ShapeTangent> {
  static void put(const AssemblyContext& ctx, const Dual& v, std::size_t row, std::size_t, std::size_t) {
    ctx.sink->residual(row, v.val());
    const std::size_t width = ctx.coordSensitivity ? ctx.coordSensitivity->cols() : 0;
    for (std::size_t k = 0; k < width; ++k) ctx.sink->tangent(row, k, v.dx(k));
  }
};

template <>
struct ResidualExtract<eval::SGResidual> {
  static void put(const AssemblyContext& ctx, const Pce& v, std::size_t row, std::size_t, std::size_t) {
    ctx.sink->residual(row, v.mean());
    for (std::size_t k = 0; k < ctx.sgBasis->size(); ++k) ctx.sink->sgResidual(k, row, v.coeff(k));
  }
};

template <>
struct ResidualExtract<eval::SGJacobian> {
  static void put(const AssemblyContext& ctx, const NestedDual& v, std::size_t row, std::size_t elem,
                  std::size_t neq) {
    const std::size_t terms = ctx.sgBasis->size();
    ctx.sink->residual(row, v.val().mean());
    for (std::size_t k = 0; k < terms; ++k) ctx.sink->sgResidual(k, row, v.val().coeff(k));
    for (std::size_t j = 0; j < 4 * neq; ++j) {
      const std::size_t col = ctx.dofs->dof(elem, j / neq, j % neq);
      const Pce d = v.dx(j);
      for (std::size_t k = 0; k < terms; ++k) ctx.sink->sgJacobian(k, row, col, d.coeff(k));
    }
  }
};

/// Sums the element residual fields (one per equation, equation order)
/// into the global objects of the evaluation type.
template <class EvalT>
class ScatterResidual : public Evaluator<EvalT> {
 public:
  ScatterResidual(const ElementDims& dims, const std::vector<std::string>& residualNames)
      : Evaluator<EvalT>("Scatter Residual"), fields_(residualNames.size()) {
    for (std::size_t k = 0; k < residualNames.size(); ++k)
      this->dependsOn(fields_[k], residualNames[k], dims.nodeScalar());
    this->evaluatesMarker(kScatterMarker);
  }

  void evaluate(const Workset& ws) override {
    const AssemblyContext& ctx = detail::contextOf(ws);
    if (!ctx.sink) throw UsageError("scatter: no sink attached to the assembly context");
    const std::size_t neq = fields_.size();
    for (std::size_t c = 0; c < ws.numElements; ++c) {
      const std::size_t e = ws.firstElement + c;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < neq; ++k)
          ResidualExtract<EvalT>::put(ctx, fields_[k](c, i), ctx.dofs->dof(e, i, k), e, neq);
    }
  }

 private:
  std::vector<ScalarRef<EvalT>> fields_;
};

namespace detail {
template <template <class> class E, class... Args, class... T>
void fillSpecialized(Registrar& r, TypeList<T...>, const Args&... args) {
  (r.set<T>([=]() -> std::unique_ptr<Evaluator<T>> { return std::make_unique<E<T>>(args...); }), ...);
}
}  // namespace detail

inline Registrar gatherSolutionRegistrar(const ElementDims& dims, const std::vector<std::string>& names) {
  Registrar r("Gather Solution");
  detail::fillSpecialized<GatherSolution>(r, AllEvaluationTypes{}, dims, names);
  return r;
}

inline Registrar gatherCoordinatesRegistrar(const ElementDims& dims) {
  Registrar r("Gather Coordinates");
  detail::fillSpecialized<GatherCoordinates>(r, AllEvaluationTypes{}, dims);
  return r;
}

inline Registrar scatterResidualRegistrar(const ElementDims& dims, const std::vector<std::string>& residualNames) {
  Registrar r("Scatter Residual");
  detail::fillSpecialized<ScatterResidual>(r, AllEvaluationTypes{}, dims, residualNames);
  return r;
}

}  // namespace genfe
