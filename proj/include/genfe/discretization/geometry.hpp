#pragma once

#include <cstddef>
#include <string>

#include "genfe/discretization/basis.hpp"
#include "genfe/error.hpp"
#include "genfe/fields/field.hpp"
#include "genfe/scalars/traits.hpp"

namespace genfe {

/// Outputs of the reference-to-physical map for one workset.
template <class M>
struct ElementGeometry {
  Field<M>* weightedMeasure = nullptr;  // [C,Q]   |j| w_q
  Field<M>* gradBF = nullptr;           // [C,N,Q,D]
  Field<M>* wBF = nullptr;              // [C,N,Q]
  Field<M>* wGradBF = nullptr;          // [C,N,Q,D]
  Field<M>* qpCoords = nullptr;         // [C,Q,D], optional
};

/// Computes the element geometry of the first numCells cells of `coords`
/// ([C,N,D]). firstElement only labels errors.
template <class M>
void computeElementGeometry(const Field<M>& coords, const BasisSet& basis, std::size_t numCells,
                            ElementGeometry<M> out, std::size_t firstElement = 0) {
  const std::size_t nn = BasisSet::numNodes;
  const std::size_t nq = basis.numQP();
  if (coords.layout().rank() != 3 || coords.extent(1) != nn || coords.extent(2) != 2)
    throw UsageError("computeElementGeometry: coordinates must be [Cell,Node=4,Dim=2], got " + coords.layout().str());
  for (std::size_t c = 0; c < numCells; ++c) {
    for (std::size_t q = 0; q < nq; ++q) {
      M j00(0.0), j01(0.0), j10(0.0), j11(0.0);
      for (std::size_t i = 0; i < nn; ++i) {
        const double gx = basis.refGradient(i, q, 0);
        const double gy = basis.refGradient(i, q, 1);
        j00 += coords(c, i, 0) * gx;
        j01 += coords(c, i, 0) * gy;
        j10 += coords(c, i, 1) * gx;
        j11 += coords(c, i, 1) * gy;
      }
      const M det = j00 * j11 - j01 * j10;
      if (!(scalarValue(det) > 0.0))
        throw DomainError("element " + std::to_string(firstElement + c) + " has non-positive Jacobian determinant " +
                          std::to_string(scalarValue(det)) + " at quadrature point " + std::to_string(q));
      const M measure = det * basis.weights[q];
      if (out.weightedMeasure) (*out.weightedMeasure)(c, q) = measure;
      for (std::size_t i = 0; i < nn; ++i) {
        const double gx = basis.refGradient(i, q, 0);
        const double gy = basis.refGradient(i, q, 1);
        const M dx = (j11 * gx - j10 * gy) / det;
        const M dy = (j00 * gy - j01 * gx) / det;
        if (out.gradBF) {
          (*out.gradBF)(c, i, q, 0) = dx;
          (*out.gradBF)(c, i, q, 1) = dy;
        }
        if (out.wBF) (*out.wBF)(c, i, q) = measure * basis.value(i, q);
        if (out.wGradBF) {
          (*out.wGradBF)(c, i, q, 0) = dx * measure;
          (*out.wGradBF)(c, i, q, 1) = dy * measure;
        }
      }
      if (out.qpCoords) {
        for (std::size_t d = 0; d < 2; ++d) {
          M x = coords(c, 0, d) * basis.value(0, q);
          for (std::size_t i = 1; i < nn; ++i) x += coords(c, i, d) * basis.value(i, q);
          (*out.qpCoords)(c, q, d) = x;
        }
      }
    }
  }
}

/// u(c,q) = sum_i phi_i(q) u(c,i).
template <class S>
void interpolateToQP(const Field<S>& nodal, const BasisSet& basis, std::size_t numCells, Field<S>& out) {
  const std::size_t nq = basis.numQP();
  if (nodal.extent(1) != BasisSet::numNodes || out.extent(1) != nq)
    throw UsageError("interpolateToQP: layout mismatch between " + nodal.layout().str() + " and " + out.layout().str());
  for (std::size_t c = 0; c < numCells; ++c)
    for (std::size_t q = 0; q < nq; ++q) {
      S u = nodal(c, 0) * basis.value(0, q);
      for (std::size_t i = 1; i < BasisSet::numNodes; ++i) u += nodal(c, i) * basis.value(i, q);
      out(c, q) = u;
    }
}

/// grad u(c,q,d) = sum_i gradBF(c,i,q,d) u(c,i).
template <class S, class M, class R>
void gradientAtQP(const Field<S>& nodal, const Field<M>& gradBF, std::size_t numCells, Field<R>& out) {
  const std::size_t nn = nodal.extent(1);
  const std::size_t nq = gradBF.extent(2);
  const std::size_t nd = gradBF.extent(3);
  if (gradBF.extent(1) != nn || out.extent(1) != nq || out.extent(2) != nd)
    throw UsageError("gradientAtQP: layout mismatch between " + nodal.layout().str() + ", " + gradBF.layout().str() +
                     " and " + out.layout().str());
  for (std::size_t c = 0; c < numCells; ++c)
    for (std::size_t q = 0; q < nq; ++q)
      for (std::size_t d = 0; d < nd; ++d) {
        R g = nodal(c, 0) * gradBF(c, 0, q, d);
        for (std::size_t i = 1; i < nn; ++i) g += nodal(c, i) * gradBF(c, i, q, d);
        out(c, q, d) = g;
      }
}

/// accum(c,i) += sum_q integrand(c,q) wBF(c,i,q) for a scalar integrand
/// [C,Q], or sum_q sum_d integrand(c,q,d) wGradBF(c,i,q,d) for a vector
/// integrand [C,Q,D].
template <class S, class T, class M>
void integrate(Field<S>& accum, const Field<T>& integrand, const Field<M>& weighted, std::size_t numCells) {
  const auto& il = integrand.layout();
  const auto& wl = weighted.layout();
  const std::size_t nn = accum.extent(1);
  const bool vector = il.rank() == 3;
  const bool ok = accum.layout().rank() == 2 && wl.rank() == il.rank() + 1 && wl.extent(1) == nn &&
                  wl.extent(2) == il.extent(1) && (!vector || wl.extent(3) == il.extent(2));
  if (!ok)
    throw UsageError("integrate: layout mismatch (accum " + accum.layout().str() + ", integrand " + il.str() +
                     ", weights " + wl.str() + ")");
  const std::size_t nq = il.extent(1);
  const std::size_t nd = vector ? il.extent(2) : 1;
  for (std::size_t c = 0; c < numCells; ++c)
    for (std::size_t i = 0; i < nn; ++i) {
      if (vector) {
        S sum = integrand(c, 0, 0) * weighted(c, i, 0, 0);
        for (std::size_t q = 0; q < nq; ++q)
          for (std::size_t d = (q == 0 ? 1 : 0); d < nd; ++d) sum += integrand(c, q, d) * weighted(c, i, q, d);
        accum(c, i) += sum;
      } else {
        S sum = integrand(c, 0) * weighted(c, i, 0);
        for (std::size_t q = 1; q < nq; ++q) sum += integrand(c, q) * weighted(c, i, q);
        accum(c, i) += sum;
      }
    }
}

}  // namespace genfe
