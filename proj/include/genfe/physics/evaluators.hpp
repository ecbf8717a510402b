#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "genfe/discretization/evaluators.hpp"
#include "genfe/discretization/geometry.hpp"
#include "genfe/discretization/layouts.hpp"
#include "genfe/error.hpp"
#include "genfe/graph/evaluator.hpp"
#include "genfe/physics/materials.hpp"
#include "genfe/physics/parameters.hpp"

namespace genfe {

namespace fieldname {
inline const char* const potential = "Potential";
inline const char* const temperature = "Temperature";
inline const char* const thermalConductivity = "Thermal Conductivity";
inline const char* const velocity = "Velocity";
inline const char* const electricalConductivity = "Electrical Conductivity";
inline const char* const heatSource = "Heat Source";
inline const char* const jouleHeating = "Joule Heating";
inline const char* const manufacturedSource = "Manufactured Source";
inline const char* const potentialResidual = "Potential Residual";
inline const char* const heatResidual = "Heat Residual";
}  // namespace fieldname

/// Region-wise thermal conductivity and convective velocity at quadrature points.
template <class EvalT>
class MaterialProperties : public Evaluator<EvalT> {
 public:
  MaterialProperties(const ElementDims& dims, std::vector<Material> byRegion)
      : Evaluator<EvalT>("Material Properties"), materials_(std::move(byRegion)) {
    this->evaluates(kappa_, fieldname::thermalConductivity, dims.qpScalar());
    this->evaluates(velocity_, fieldname::velocity, dims.qpVector());
  }

  void evaluate(const Workset& ws) override {
    const Material& m = materials_.at(static_cast<std::size_t>(ws.region));
    const std::size_t nq = kappa_.extent(1);
    for (std::size_t c = 0; c < ws.numElements; ++c)
      for (std::size_t q = 0; q < nq; ++q) {
        kappa_(c, q) = m.kappa;
        velocity_(c, q, 0) = m.velocity[0];
        velocity_(c, q, 1) = m.velocity[1];
      }
  }

 private:
  std::vector<Material> materials_;
  RealRef<EvalT> kappa_, velocity_;
};

/// sigma(T) = sigma0 / (1 + beta (T - T0)).
template <class EvalT>
class ElectricalConductivity : public Evaluator<EvalT> {
 public:
  using ScalarT = typename EvalT::ScalarT;

  /// `feedback` scales beta; 0 freezes the conductivity at its T0 value.
  ElectricalConductivity(const ElementDims& dims, std::vector<Material> byRegion, ParameterLibrary* params,
                         const double* feedback = nullptr)
      : Evaluator<EvalT>("Electrical Conductivity"),
        materials_(std::move(byRegion)),
        sigma0_(materials_.size()),
        feedback_(feedback) {
    this->dependsOn(temperature_, fieldname::atQP(fieldname::temperature), dims.qpScalar());
    this->evaluates(sigma_, fieldname::electricalConductivity, dims.qpScalar());
    for (std::size_t r = 0; r < materials_.size(); ++r) {
      if (materials_[r].sigma0Parameter.empty())
        sigma0_[r] = ScalarT(materials_[r].sigma0);
      else
        params->template bind<EvalT>(materials_[r].sigma0Parameter, &sigma0_[r]);
    }
  }

  void evaluate(const Workset& ws) override {
    const auto r = static_cast<std::size_t>(ws.region);
    const Material& m = materials_.at(r);
    const ScalarT& s0 = sigma0_[r];
    const double beta = feedback_ ? *feedback_ * m.beta : m.beta;
    const std::size_t nq = sigma_.extent(1);
    for (std::size_t c = 0; c < ws.numElements; ++c)
      for (std::size_t q = 0; q < nq; ++q) {
        const ScalarT denom = 1.0 + beta * (temperature_(c, q) - m.T0);
        if (!(scalarValue(denom) > 0.0))
          throw NonphysicalStateError("element " + std::to_string(ws.firstElement + c) +
                                      ": conductivity denominator 1 + beta (T - T0) = " +
                                      std::to_string(scalarValue(denom)) + " is not positive");
        sigma_(c, q) = s0 / denom;
      }
  }

 private:
  std::vector<Material> materials_;
  std::vector<ScalarT> sigma0_;
  const double* feedback_;
  ScalarRef<EvalT> temperature_, sigma_;
};

/// s = alpha + beta T^2 with model parameters "Alpha" and "Beta".
template <class EvalT>
class SourceTerm : public Evaluator<EvalT> {
 public:
  using ScalarT = typename EvalT::ScalarT;

  SourceTerm(const ElementDims& dims, ParameterLibrary* params) : Evaluator<EvalT>("Source Term") {
    this->dependsOn(u_, fieldname::atQP(fieldname::temperature), dims.qpScalar());
    this->evaluates(source_, fieldname::heatSource, dims.qpScalar());
    params->template bind<EvalT>("Alpha", &alpha_);
    params->template bind<EvalT>("Beta", &beta_);
  }

  void evaluate(const Workset& ws) override {
    const std::size_t nq = source_.extent(1);
    for (std::size_t c = 0; c < ws.numElements; ++c)
      for (std::size_t q = 0; q < nq; ++q) source_(c, q) = alpha_ + beta_ * u_(c, q) * u_(c, q);
  }

 private:
  ScalarT alpha_{}, beta_{};
  ScalarRef<EvalT> u_, source_;
};

/// sigma |grad psi|^2.
template <class EvalT>
class JouleHeating : public Evaluator<EvalT> {
 public:
  explicit JouleHeating(const ElementDims& dims) : Evaluator<EvalT>("Joule Heating") {
    this->dependsOn(sigma_, fieldname::electricalConductivity, dims.qpScalar());
    this->dependsOn(gradPsi_, fieldname::gradient(fieldname::potential), dims.qpVector());
    this->evaluates(joule_, fieldname::jouleHeating, dims.qpScalar());
  }

  void evaluate(const Workset& ws) override {
    const std::size_t nq = joule_.extent(1);
    for (std::size_t c = 0; c < ws.numElements; ++c)
      for (std::size_t q = 0; q < nq; ++q)
        joule_(c, q) = sigma_(c, q) * (gradPsi_(c, q, 0) * gradPsi_(c, q, 0) + gradPsi_(c, q, 1) * gradPsi_(c, q, 1));
  }

 private:
  ScalarRef<EvalT> sigma_, gradPsi_, joule_;
};

/// Forcing that makes T = sin(pi x) sin(pi y) solve the heat equation
/// without Joule heating.
template <class EvalT>
class ManufacturedSource : public Evaluator<EvalT> {
 public:
  ManufacturedSource(const ElementDims& dims, double kappa, std::array<double, 2> velocity)
      : Evaluator<EvalT>("Manufactured Source"), kappa_(kappa), velocity_(velocity) {
    this->dependsOn(x_, fieldname::qpCoordinates, dims.qpVector());
    this->evaluates(f_, fieldname::manufacturedSource, dims.qpScalar());
  }

  void evaluate(const Workset& ws) override {
    using std::cos;
    using std::sin;
    constexpr double pi = std::numbers::pi;
    const std::size_t nq = f_.extent(1);
    for (std::size_t c = 0; c < ws.numElements; ++c)
      for (std::size_t q = 0; q < nq; ++q) {
        const auto px = x_(c, q, 0) * pi;
        const auto py = x_(c, q, 1) * pi;
        f_(c, q) = 2.0 * kappa_ * pi * pi * sin(px) * sin(py) -
                   pi * (velocity_[0] * cos(px) * sin(py) + velocity_[1] * sin(px) * cos(py));
      }
  }

  static double exact(double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); }

 private:
  double kappa_;
  std::array<double, 2> velocity_;
  MeshRef<EvalT> x_, f_;
};

/// R_psi(i) = int sigma grad psi . grad phi_i
template <class EvalT>
class PotentialResidual : public Evaluator<EvalT> {
 public:
  using ScalarT = typename EvalT::ScalarT;

  explicit PotentialResidual(const ElementDims& dims)
      : Evaluator<EvalT>("Potential Residual"), flux_("Current Flux", dims.qpVector()) {
    this->dependsOn(sigma_, fieldname::electricalConductivity, dims.qpScalar());
    this->dependsOn(gradPsi_, fieldname::gradient(fieldname::potential), dims.qpVector());
    this->dependsOn(wGradBF_, fieldname::wGradBF, dims.nodeQPVector());
    this->evaluates(residual_, fieldname::potentialResidual, dims.nodeScalar());
  }

  void evaluate(const Workset& ws) override {
    const std::size_t nq = flux_.extent(1);
    for (std::size_t c = 0; c < ws.numElements; ++c) {
      for (std::size_t i = 0; i < residual_.extent(1); ++i) residual_(c, i) = ScalarT(0.0);
      for (std::size_t q = 0; q < nq; ++q)
        for (std::size_t d = 0; d < 2; ++d) flux_(c, q, d) = sigma_(c, q) * gradPsi_(c, q, d);
    }
    integrate(residual_.field(), flux_, wGradBF_.field(), ws.numElements);
  }

 private:
  Field<ScalarT> flux_;
  ScalarRef<EvalT> sigma_, gradPsi_, residual_;
  MeshRef<EvalT> wGradBF_;
};

/// R_T(i) = int kappa grad T . grad phi_i - (v . grad T) phi_i - (q_J + s + f) phi_i
template <class EvalT>
class HeatResidual : public Evaluator<EvalT> {
 public:
  using ScalarT = typename EvalT::ScalarT;

  HeatResidual(const ElementDims& dims, bool joule, bool manufactured)
      : Evaluator<EvalT>("Heat Residual"),
        joule_(joule),
        manufactured_(manufactured),
        flux_("Heat Flux", dims.qpVector()),
        convection_("Convection", dims.qpScalar()),
        source_("Total Source", dims.qpScalar()) {
    this->dependsOn(kappa_, fieldname::thermalConductivity, dims.qpScalar());
    this->dependsOn(velocity_, fieldname::velocity, dims.qpVector());
    this->dependsOn(gradT_, fieldname::gradient(fieldname::temperature), dims.qpVector());
    this->dependsOn(heatSource_, fieldname::heatSource, dims.qpScalar());
    if (joule_) this->dependsOn(jouleHeating_, fieldname::jouleHeating, dims.qpScalar());
    if (manufactured_) this->dependsOn(mms_, fieldname::manufacturedSource, dims.qpScalar());
    this->dependsOn(wBF_, fieldname::wBF, dims.nodeQP());
    this->dependsOn(wGradBF_, fieldname::wGradBF, dims.nodeQPVector());
    this->evaluates(residual_, fieldname::heatResidual, dims.nodeScalar());
  }

  void evaluate(const Workset& ws) override {
    const std::size_t nq = flux_.extent(1);
    for (std::size_t c = 0; c < ws.numElements; ++c) {
      for (std::size_t i = 0; i < residual_.extent(1); ++i) residual_(c, i) = ScalarT(0.0);
      for (std::size_t q = 0; q < nq; ++q) {
        flux_(c, q, 0) = kappa_(c, q) * gradT_(c, q, 0);
        flux_(c, q, 1) = kappa_(c, q) * gradT_(c, q, 1);
        convection_(c, q) = -(velocity_(c, q, 0) * gradT_(c, q, 0) + velocity_(c, q, 1) * gradT_(c, q, 1));
        ScalarT s = heatSource_(c, q);
        if (joule_) s = jouleHeating_(c, q) + s;
        if (manufactured_) s = s + mms_(c, q);
        source_(c, q) = -s;
      }
    }
    integrate(residual_.field(), flux_, wGradBF_.field(), ws.numElements);
    integrate(residual_.field(), convection_, wBF_.field(), ws.numElements);
    integrate(residual_.field(), source_, wBF_.field(), ws.numElements);
  }

 private:
  bool joule_;
  bool manufactured_;
  Field<ScalarT> flux_, convection_, source_;
  RealRef<EvalT> kappa_, velocity_;
  ScalarRef<EvalT> gradT_, heatSource_, jouleHeating_, residual_;
  MeshRef<EvalT> mms_, wBF_, wGradBF_;
};

}  // namespace genfe
