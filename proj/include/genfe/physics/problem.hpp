#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "genfe/assembly.hpp"
#include "genfe/discretization.hpp"
#include "genfe/graph.hpp"
#include "genfe/physics/evaluators.hpp"
#include "genfe/physics/materials.hpp"
#include "genfe/physics/parameters.hpp"

namespace genfe {

struct ProblemOptions {
  MaterialTable materials = MaterialTable::sliderDefaults();
  std::vector<DirichletSpec> dirichlet = defaultSliderDirichlet();
  std::size_t quadOrder = 2;
  AssemblerOptions assembler;
  bool jouleHeating = true;
  bool manufacturedSource = false;
  double alpha = 0.0;
  double beta = 0.0;
  double padConductivity = 35.0;

  /// psi = 0 and T = 0 at the far conductor end, psi = 0.5 on the symmetry plane.
  static std::vector<DirichletSpec> defaultSliderDirichlet() {
    return {{0, "left_conductor_end", 0.0}, {0, "symmetry_plane", 0.5}, {1, "left_conductor_end", 0.0}};
  }
};

/// Coupled potential / heat model on a quadrilateral mesh: owns the
/// parameter library, the evaluator graphs of every evaluation type and the
/// assembler. The mesh coordinates may be replaced (morphing); the topology
/// is fixed.
class ThermoElectricProblem {
 public:
  static constexpr std::size_t kNumEq = 2;
  static constexpr std::size_t kPotentialEq = 0;
  static constexpr std::size_t kTemperatureEq = 1;

  ThermoElectricProblem(Mesh mesh, ProblemOptions options)
      : mesh_(std::move(mesh)), options_(std::move(options)), basis_(bilinearBasis(options_.quadOrder)) {
    materials_ = options_.materials.forMesh(mesh_);
    params_.registerParameter("Alpha", options_.alpha);
    params_.registerParameter("Beta", options_.beta);
    params_.registerParameter("Pad Conductivity", options_.padConductivity);
    for (const auto& m : materials_)
      if (!m.sigma0Parameter.empty() && !params_.has(m.sigma0Parameter))
        throw ConfigError("material refers to unknown parameter '" + m.sigma0Parameter + "'");
    params_.freeze();
    dims_ = ElementDims{std::min(options_.assembler.worksetSize, mesh_.numElements()), 4, basis_.numQP(), 2};
    assembler_ = std::make_unique<Assembler>(mesh_, kNumEq, [this] { return buildGraphs(); }, options_.assembler);
    dirichlet_ = DirichletSet(mesh_, assembler_->dofs(), options_.dirichlet);
  }

  ThermoElectricProblem(const ThermoElectricProblem&) = delete;
  ThermoElectricProblem& operator=(const ThermoElectricProblem&) = delete;

  /// One registrar per evaluator, gather and scatter included.
  std::vector<Registrar> registrars() {
    const std::vector<std::string> dofs{fieldname::potential, fieldname::temperature};
    std::vector<Registrar> r;
    r.push_back(gatherCoordinatesRegistrar(dims_));
    r.push_back(gatherSolutionRegistrar(dims_, dofs));
    r.push_back(makeRegistrar<ComputeBasisFunctions>("Compute Basis Functions", dims_, basis_));
    for (const auto& d : dofs) {
      r.push_back(makeRegistrar<DofInterpolation>("Interpolate " + d, dims_, basis_, d));
      r.push_back(makeRegistrar<DofGradient>("Gradient " + d, dims_, d));
    }
    r.push_back(makeRegistrar<MaterialProperties>("Material Properties", dims_, materials_));
    r.push_back(makeRegistrar<ElectricalConductivity>("Electrical Conductivity", dims_, materials_, &params_,
                                                      &feedback_));
    r.push_back(makeRegistrar<SourceTerm>("Source Term", dims_, &params_));
    if (options_.jouleHeating) r.push_back(makeRegistrar<JouleHeating>("Joule Heating", dims_));
    if (options_.manufacturedSource) {
      const Material& m = materials_.front();
      r.push_back(makeRegistrar<ManufacturedSource>("Manufactured Source", dims_, m.kappa, m.velocity));
    }
    r.push_back(makeRegistrar<PotentialResidual>("Potential Residual", dims_));
    r.push_back(
        makeRegistrar<HeatResidual>("Heat Residual", dims_, options_.jouleHeating, options_.manufacturedSource));
    r.push_back(scatterResidualRegistrar(dims_, {fieldname::potentialResidual, fieldname::heatResidual}));
    return r;
  }

  ParameterLibrary& parameters() { return params_; }
  const ParameterLibrary& parameters() const { return params_; }
  const Mesh& mesh() const { return mesh_; }
  const ProblemOptions& options() const { return options_; }
  const DofMap& dofs() const { return assembler_->dofs(); }
  const DirichletSet& dirichlet() const { return dirichlet_; }
  Assembler& assembler() { return *assembler_; }
  std::size_t numDofs() const { return assembler_->dofs().numDofs(); }
  CsrMatrix makeMatrix() const { return assembler_->makeMatrix(); }
  double maxPeclet() const { return maxElementPeclet(mesh_, materials_); }

  /// Replaces the node coordinates; connectivity must be unchanged.
  void setMesh(const Mesh& m) {
    if (m.connectivity != mesh_.connectivity || m.regionOf != mesh_.regionOf)
      throw UsageError("setMesh: topology differs from the problem mesh");
    mesh_.coords = m.coords;
  }

  /// Switches the temperature dependence of the electrical conductivity
  /// off (sigma = sigma0) or back on.
  void setConductivityFeedback(bool on) { feedback_ = on ? 1.0 : 0.0; }
  bool conductivityFeedback() const { return feedback_ != 0.0; }

  /// Zero state with the Dirichlet values imposed.
  std::vector<double> initialGuess() const {
    std::vector<double> x(numDofs(), 0.0);
    dirichlet_.impose(x);
    return x;
  }

  void residual(std::span<const double> x, std::vector<double>& f, bool applyBC = true) {
    f.resize(numDofs());
    auto ctx = context(x);
    assembler_->assemble<eval::Residual>(ctx, AssemblyOutputs{&f});
    if (applyBC) dirichlet_.applyResidual(f, x);
  }

  void jacobian(std::span<const double> x, std::vector<double>& f, CsrMatrix& jac, bool applyBC = true) {
    f.resize(numDofs());
    if (!jac.samePattern(assembler_->makeMatrix())) jac = makeMatrix();
    auto ctx = context(x);
    assembler_->assemble<eval::Jacobian>(ctx, AssemblyOutputs{&f, &jac});
    if (applyBC) {
      dirichlet_.applyResidual(f, x);
      dirichlet_.applyJacobian(jac);
    }
  }

  /// df/dp for the named parameters followed by (df/dx) v for each column
  /// v of `directions`.
  void tangent(std::span<const double> x, const std::vector<std::string>& paramNames, const MultiVector* directions,
               std::vector<double>& f, MultiVector& dfdp, bool applyBC = true) {
    const std::size_t width = paramNames.size() + (directions ? directions->cols() : 0);
    f.resize(numDofs());
    dfdp = MultiVector(numDofs(), width);
    auto ctx = context(x);
    ctx.directions = directions;
    ctx.tangentParams = paramNames.size();
    params_.seedTangent(paramNames, width);
    try {
      assembler_->assemble<eval::Tangent>(ctx, AssemblyOutputs{&f, nullptr, &dfdp});
    } catch (...) {
      params_.clearTangentSeeds();
      throw;
    }
    params_.clearTangentSeeds();
    if (applyBC) {
      dirichlet_.applyResidual(f, x);
      dirichlet_.applyTangent(dfdp, paramNames.size(), directions);
    }
  }

  /// (df/dX) X_p with X_p the coordinate sensitivities [2 numNodes x numShape].
  void shapeTangent(std::span<const double> x, const MultiVector& xp, std::vector<double>& f, MultiVector& dfdp,
                    bool applyBC = true) {
    f.resize(numDofs());
    dfdp = MultiVector(numDofs(), xp.cols());
    auto ctx = context(x);
    ctx.coordSensitivity = &xp;
    assembler_->assemble<eval::ShapeTangent>(ctx, AssemblyOutputs{&f, nullptr, &dfdp});
    if (applyBC) {
      dirichlet_.applyResidual(f, x);
      dirichlet_.applyShapeTangent(dfdp);
    }
  }

  void sgResidual(const SGVector& x, SGVector& f, bool applyBC = true) {
    const BasisData& basis = sgBasis();
    f = SGVector(basis.size(), numDofs());
    auto ctx = context({});
    ctx.sgX = &x;
    ctx.sgBasis = &basis;
    assembler_->assemble<eval::SGResidual>(ctx, AssemblyOutputs{nullptr, nullptr, nullptr, &f});
    if (applyBC) dirichlet_.applySG(&f, x, nullptr);
  }

  void sgJacobian(const SGVector& x, SGVector& f, std::vector<CsrMatrix>& jac, bool applyBC = true) {
    const BasisData& basis = sgBasis();
    f = SGVector(basis.size(), numDofs());
    if (jac.size() != basis.size()) jac.assign(basis.size(), makeMatrix());
    auto ctx = context({});
    ctx.sgX = &x;
    ctx.sgBasis = &basis;
    assembler_->assemble<eval::SGJacobian>(ctx, AssemblyOutputs{nullptr, nullptr, nullptr, &f, &jac});
    if (applyBC) dirichlet_.applySG(&f, x, &jac);
  }

  /// Text or Graphviz listing of the graph of one evaluation type.
  std::string dumpGraph(EvalTag tag, bool dot) {
    std::string out;
    dispatchEvalTag(tag, [&](auto t) {
      auto& g = assembler_->graphs().template get<decltype(t)>();
      out = dot ? g.dumpDot(std::string(evalTagName(tag))) : g.dumpText();
    });
    return out;
  }

 private:
  GraphSet buildGraphs() {
    return instantiateForAllTypes(registrars(),
                                  {EvalTag::Residual, EvalTag::Jacobian, EvalTag::Tangent, EvalTag::ShapeTangent,
                                   EvalTag::SGResidual, EvalTag::SGJacobian},
                                  {FieldRequest{kScatterMarker, ScalarKind::Real}});
  }

  AssemblyContext context(std::span<const double> x) const {
    AssemblyContext ctx;
    ctx.mesh = &mesh_;
    ctx.x = x;
    return ctx;
  }

  const BasisData& sgBasis() const {
    if (!params_.stochasticBasis()) throw UsageError("stochastic Galerkin assembly without a stochastic basis");
    return *params_.stochasticBasis();
  }

  Mesh mesh_;
  ProblemOptions options_;
  BasisSet basis_;
  std::vector<Material> materials_;
  ParameterLibrary params_;
  ElementDims dims_;
  std::unique_ptr<Assembler> assembler_;
  DirichletSet dirichlet_;
  double feedback_ = 1.0;
};

}  // namespace genfe
