#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "genfe/error.hpp"
#include "genfe/quadrature.hpp"

namespace genfe {

/// Bilinear basis on the reference square [-1, 1]^2 tabulated at a
/// tensor-product Gauss rule.
struct BasisSet {
  static constexpr std::size_t numNodes = 4;
  static constexpr std::size_t dim = 2;
  static constexpr std::array<std::array<double, 2>, 4> referenceNodes{{{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}};

  std::size_t order = 0;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;
  std::vector<double> values;        // [node][qp]
  std::vector<double> refGradients;  // [node][qp][dim]

  std::size_t numQP() const { return points.size(); }
  double value(std::size_t i, std::size_t q) const { return values[i * numQP() + q]; }
  double refGradient(std::size_t i, std::size_t q, std::size_t d) const {
    return refGradients[(i * numQP() + q) * dim + d];
  }

  static double shape(std::size_t i, double xi, double eta) {
    const auto& n = referenceNodes[i];
    return 0.25 * (1.0 + xi * n[0]) * (1.0 + eta * n[1]);
  }
  static std::array<double, 2> shapeGradient(std::size_t i, double xi, double eta) {
    const auto& n = referenceNodes[i];
    return {0.25 * n[0] * (1.0 + eta * n[1]), 0.25 * n[1] * (1.0 + xi * n[0])};
  }
};

/// quadOrder is the number of Gauss points per direction (1, 2 or 3).
inline BasisSet bilinearBasis(std::size_t quadOrder = 2) {
  if (quadOrder < 1 || quadOrder > 3)
    throw ConfigError("unsupported quadrature order " + std::to_string(quadOrder) + " (expected 1, 2 or 3)");
  const GaussLegendreRule rule = gaussLegendre(quadOrder);
  BasisSet b;
  b.order = quadOrder;
  for (std::size_t j = 0; j < quadOrder; ++j)
    for (std::size_t i = 0; i < quadOrder; ++i) {
      b.points.push_back({rule.nodes[i], rule.nodes[j]});
      b.weights.push_back(rule.weights[i] * rule.weights[j]);
    }
  const std::size_t nq = b.numQP();
  b.values.resize(BasisSet::numNodes * nq);
  b.refGradients.resize(BasisSet::numNodes * nq * 2);
  for (std::size_t n = 0; n < BasisSet::numNodes; ++n)
    for (std::size_t q = 0; q < nq; ++q) {
      const auto [xi, eta] = b.points[q];
      b.values[n * nq + q] = BasisSet::shape(n, xi, eta);
      const auto g = BasisSet::shapeGradient(n, xi, eta);
      b.refGradients[(n * nq + q) * 2] = g[0];
      b.refGradients[(n * nq + q) * 2 + 1] = g[1];
    }
  return b;
}

}  // namespace genfe
