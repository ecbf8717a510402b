#pragma once

#include <string>

#include "genfe/discretization/basis.hpp"
#include "genfe/discretization/geometry.hpp"
#include "genfe/discretization/layouts.hpp"
#include "genfe/graph/evaluator.hpp"

namespace genfe {

namespace fieldname {
inline const char* const coordinates = "Coordinates";
inline const char* const weightedMeasure = "Weighted Measure";
inline const char* const gradBF = "Grad BF";
inline const char* const wBF = "wBF";
inline const char* const wGradBF = "wGrad BF";
inline const char* const qpCoordinates = "QP Coordinates";
inline std::string atQP(const std::string& dof) { return dof + " QP"; }
inline std::string gradient(const std::string& dof) { return dof + " Gradient"; }
}  // namespace fieldname

/// Element geometry from the gathered coordinates, in MeshScalarT.
template <class EvalT>
class ComputeBasisFunctions : public Evaluator<EvalT> {
 public:
  ComputeBasisFunctions(const ElementDims& dims, BasisSet basis)
      : Evaluator<EvalT>("Compute Basis Functions"), basis_(std::move(basis)) {
    this->dependsOn(coords_, fieldname::coordinates, dims.nodeVector());
    this->evaluates(measure_, fieldname::weightedMeasure, dims.qpScalar());
    this->evaluates(gradBF_, fieldname::gradBF, dims.nodeQPVector());
    this->evaluates(wBF_, fieldname::wBF, dims.nodeQP());
    this->evaluates(wGradBF_, fieldname::wGradBF, dims.nodeQPVector());
    this->evaluates(qpCoords_, fieldname::qpCoordinates, dims.qpVector());
  }

  void evaluate(const Workset& ws) override {
    computeElementGeometry(coords_.field(), basis_, ws.numElements,
                           ElementGeometry<typename EvalT::MeshScalarT>{&measure_.field(), &gradBF_.field(),
                                                                        &wBF_.field(), &wGradBF_.field(),
                                                                        &qpCoords_.field()},
                           ws.firstElement);
  }

 private:
  BasisSet basis_;
  MeshRef<EvalT> coords_, measure_, gradBF_, wBF_, wGradBF_, qpCoords_;
};

/// Nodal unknown to its quadrature-point values.
template <class EvalT>
class DofInterpolation : public Evaluator<EvalT> {
 public:
  DofInterpolation(const ElementDims& dims, BasisSet basis, const std::string& dof)
      : Evaluator<EvalT>("Interpolate " + dof), basis_(std::move(basis)) {
    this->dependsOn(nodal_, dof, dims.nodeScalar());
    this->evaluates(qp_, fieldname::atQP(dof), dims.qpScalar());
  }

  void evaluate(const Workset& ws) override { interpolateToQP(nodal_.field(), basis_, ws.numElements, qp_.field()); }

 private:
  BasisSet basis_;
  ScalarRef<EvalT> nodal_, qp_;
};

/// Nodal unknown to its physical gradient at quadrature points.
template <class EvalT>
class DofGradient : public Evaluator<EvalT> {
 public:
  DofGradient(const ElementDims& dims, const std::string& dof) : Evaluator<EvalT>("Gradient " + dof) {
    this->dependsOn(nodal_, dof, dims.nodeScalar());
    this->dependsOn(gradBF_, fieldname::gradBF, dims.nodeQPVector());
    this->evaluates(grad_, fieldname::gradient(dof), dims.qpVector());
  }

  void evaluate(const Workset& ws) override {
    gradientAtQP(nodal_.field(), gradBF_.field(), ws.numElements, grad_.field());
  }

 private:
  ScalarRef<EvalT> nodal_;
  MeshRef<EvalT> gradBF_;
  ScalarRef<EvalT> grad_;
};

}  // namespace genfe
