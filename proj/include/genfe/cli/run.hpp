#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "genfe/analysis.hpp"
#include "genfe/cli/config.hpp"
#include "genfe/discretization.hpp"
#include "genfe/morphing.hpp"
#include "genfe/physics.hpp"

namespace genfe::cli {

inline constexpr const char* kVersion = "1.0.0";

using json = nlohmann::ordered_json;

struct RunOptions {
  bool dumpGraph = false;
  std::ostream* log = &std::cerr;
};

struct RunOutcome {
  int exitCode = 0;
  json summary;
};

inline GeometryParams geometryOf(const RunConfig& c) {
  GeometryParams g;
  g.conductorLength = c.getDouble("mesh", "conductorLength");
  g.padLength = c.getDouble("mesh", "padLength");
  g.sliderHalfLength = c.getDouble("mesh", "sliderHalfLength");
  g.height = c.getDouble("mesh", "height");
  return g;
}

inline Mesh meshOf(const RunConfig& c) {
  const std::string type = c.getString("mesh", "type");
  if (type == "slider") {
    const SliderResolution res{c.getSize("mesh", "conductorElements"), c.getSize("mesh", "padElements"),
                               c.getSize("mesh", "sliderElements"), c.getSize("mesh", "heightElements")};
    if (res.conductor == 0 || res.pad == 0 || res.slider == 0 || res.height == 0)
      throw ConfigError("mesh: element counts must be positive");
    return buildSliderMesh(geometryOf(c), res);
  }
  if (type == "rectangle") {
    const std::size_t nx = c.getSize("mesh", "nx"), ny = c.getSize("mesh", "ny");
    if (nx == 0 || ny == 0) throw ConfigError("mesh: element counts must be positive");
    return buildRectangleMesh(c.getDouble("mesh", "width"), c.getDouble("mesh", "height"), nx, ny);
  }
  throw ConfigError("mesh.type: unknown mesh type '" + type + "'");
}

inline ProblemOptions problemOptionsOf(const RunConfig& c) {
  ProblemOptions o;
  o.materials = MaterialTable{};
  for (const char* region : {"conductor", "pad", "slider"}) {
    Material m;
    m.sigma0 = c.getDouble(region, "sigma0");
    m.kappa = c.getDouble(region, "kappa");
    m.velocity = {c.getDouble(region, "velocityX"), c.getDouble(region, "velocityY")};
    m.beta = c.getDouble(region, "beta");
    m.T0 = c.getDouble(region, "T0");
    m.sigma0Parameter = c.getString(region, "sigma0Parameter");
    o.materials.set(region, m);
  }
  o.jouleHeating = c.getBool("model", "jouleHeating");
  o.manufacturedSource = c.getBool("model", "manufacturedSource");
  o.quadOrder = c.getSize("model", "quadOrder");
  o.alpha = c.getDouble("parameters", "Alpha");
  o.beta = c.getDouble("parameters", "Beta");
  o.padConductivity = c.getDouble("parameters", "Pad Conductivity");
  o.assembler.threads = std::max<std::size_t>(1, c.getSize("run", "threads"));
  o.assembler.worksetSize = std::max<std::size_t>(1, c.getSize("run", "worksetSize"));

  const auto& bc = c.section("dirichlet");
  if (!bc.empty()) {
    o.dirichlet.clear();
    for (const auto& [key, value] : bc) {
      const auto dot = key.find('.');
      const std::string eq = key.substr(0, dot);
      if (dot == std::string::npos || (eq != "potential" && eq != "temperature"))
        throw ConfigError("dirichlet." + key + ": expected <potential|temperature>.<node set>");
      double v = 0.0;
      try {
        v = std::stod(value);
      } catch (const std::exception&) {
        throw ConfigError("dirichlet." + key + ": '" + value + "' is not a number");
      }
      o.dirichlet.push_back({eq == "potential" ? 0u : 1u, key.substr(dot + 1), v});
    }
  } else if (c.getString("mesh", "type") != "slider") {
    throw ConfigError("mesh type '" + c.getString("mesh", "type") + "' needs a [dirichlet] section");
  }
  return o;
}

inline NewtonConfig newtonConfigOf(const RunConfig& c) {
  NewtonConfig n;
  n.absTol = c.getDouble("solver", "absTol");
  n.relTol = c.getDouble("solver", "relTol");
  n.maxIters = c.getSize("solver", "maxIters");
  n.maxBacktracks = c.getSize("solver", "maxBacktracks");
  n.linear.tolerance = c.getDouble("solver", "gmresTolerance");
  const std::string kind = c.getString("solver", "linear");
  if (kind == "auto") n.linear.kind = LinearSolverKind::Auto;
  else if (kind == "dense") n.linear.kind = LinearSolverKind::DenseLU;
  else if (kind == "gmres") n.linear.kind = LinearSolverKind::Gmres;
  else throw ConfigError("solver.linear: unknown solver '" + kind + "'");
  return n;
}

namespace detail {

class Output {
 public:
  explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream os(dir_ / name);
    if (!os) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
    os.precision(17);
    return os;
  }

  void solution(const Mesh& mesh, const std::vector<double>& x, const std::string& stem = "solution") const {
    auto csv = open(stem + ".csv");
    writeSolutionCsv(csv, mesh, x);
    auto vtk = open(stem + ".vtk");
    writeVtk(vtk, mesh, x);
  }

  void history(const std::vector<double>& h, const std::string& name = "newton_history.csv") const {
    auto os = open(name);
    os << "iteration,residualNorm\n";
    for (std::size_t i = 0; i < h.size(); ++i) os << i << "," << h[i] << "\n";
  }

 private:
  std::filesystem::path dir_;
};

inline json newtonSummary(const NewtonResult& r) {
  return {{"iterations", r.iterations},
          {"converged", r.converged},
          {"finalResidualNorm", r.history.empty() ? 0.0 : r.history.back()},
          {"history", r.history}};
}

inline void setParameterOrThrow(ThermoElectricProblem& p, const std::string& name, double v) {
  if (!p.parameters().has(name)) throw ConfigError("unknown model parameter '" + name + "'");
  p.parameters().setValue(name, v);
}

inline void writeMatrices(const Output& out, ThermoElectricProblem& problem, const std::vector<double>& x) {
  std::vector<double> f;
  CsrMatrix j;
  problem.jacobian(x, f, j);
  auto jm = out.open("jacobian.mtx");
  writeMatrixMarket(jm, j);
  auto rm = out.open("residual.mtx");
  writeMatrixMarket(rm, std::span<const double>(f));
}

inline SliderMorph morphOf(const RunConfig& c, const Mesh& base) {
  const std::size_t n = c.getSize("shape", "parameters");
  if (n != 1 && n != 2) throw ConfigError("shape.parameters must be 1 or 2");
  if (c.getString("mesh", "type") != "slider") throw ConfigError("shape modes need mesh.type = slider");
  return SliderMorph(base, geometryOf(c), n == 1 ? MorphMode::OneParameter : MorphMode::TwoParameter);
}

inline std::vector<double> shapeList(const RunConfig& c, const std::string& key, std::size_t n) {
  std::vector<double> v = c.getList("shape", key);
  if (v.size() == 1 && n == 2) v.push_back(v.front());
  if (v.size() != n) throw ConfigError("shape." + key + ": expected " + std::to_string(n) + " values");
  return v;
}

inline void runSolve(const RunConfig& c, ThermoElectricProblem& problem, const Output& out, json& s) {
  const NewtonConfig newton = newtonConfigOf(c);
  const NewtonResult warm = frozenConductivitySolve(problem, newton);
  const NewtonResult r = newtonSolve(problem, warm.x, newton);
  const MaxTemperature g = objectiveMaxTemperature(r.x);
  s["warmStart"] = newtonSummary(warm);
  s["newton"] = newtonSummary(r);
  s["g"] = g.value;
  s["gDof"] = g.dof;
  out.solution(problem.mesh(), r.x);
  out.history(r.history);
  if (c.getBool("solver", "writeMatrix")) writeMatrices(out, problem, r.x);
}

inline int runContinuation(const RunConfig& c, ThermoElectricProblem& problem, const Output& out, json& s) {
  const NewtonConfig newton = newtonConfigOf(c);
  const std::string name = c.getString("continuation", "parameter");
  const double from = c.getDouble("continuation", "from");
  const double to = c.getDouble("continuation", "to");
  const std::size_t points = c.getSize("continuation", "points");
  ContinuationConfig cfg;
  cfg.maxBisections = c.getSize("continuation", "maxBisections");

  std::optional<SliderMorph> morph;
  ContinuationProblem cp;
  if (name == "shape") {
    morph.emplace(morphOf(c, problem.mesh()));
    cp = shapeContinuation(problem, *morph, std::vector<double>(morph->numParams() - 1, 0.0), newton);
  } else {
    cp = parameterContinuation(problem, name, newton);
  }
  cp.setParameter(from);
  const std::vector<double> x0 = solveState(problem, newton).x;
  const ContinuationResult r = continuation(cp, from, to, points, x0, cfg);

  auto csv = out.open("continuation.csv");
  csv << "p,g,newtonIterations,bisections\n";
  json table = json::array();
  for (const auto& pt : r.points) {
    csv << pt.p << "," << pt.g << "," << pt.newtonIterations << "," << pt.bisections << "\n";
    table.push_back({{"p", pt.p}, {"g", pt.g}, {"newtonIterations", pt.newtonIterations}, {"bisections", pt.bisections}});
  }
  s["continuation"] = {{"parameter", name}, {"complete", r.complete}, {"message", r.message}, {"points", table}};
  if (!r.points.empty()) {
    s["g"] = r.points.back().g;
    out.solution(problem.mesh(), r.state);
  }
  return r.complete ? 0 : 1;
}

inline int runOptimize(const RunConfig& c, ThermoElectricProblem& problem, const Output& out, json& s,
                       std::ostream& log) {
  const NewtonConfig newton = newtonConfigOf(c);
  const SliderMorph morph = morphOf(c, problem.mesh());
  const std::size_t n = morph.numParams();
  const auto p0 = shapeList(c, "initial", n);
  const auto lower = shapeList(c, "lower", n);
  const auto upper = shapeList(c, "upper", n);
  OptimizerConfig cfg;
  cfg.tolerance = c.getDouble("shape", "tolerance");
  cfg.maxIterations = c.getSize("shape", "maxIterations");

  ShapeObjective objective(problem, morph, newton);
  const OptimizerResult r = optimize(
      [&](std::span<const double> p) {
        const ShapeEvaluation e = objective.evaluate(p);
        log << "  p =";
        for (double v : p) log << " " << v;
        log << "  g = " << e.g << "\n";
        return std::make_pair(e.g, e.gradient);
      },
      p0, lower, upper, cfg);

  auto csv = out.open("optimizer.csv");
  csv << "iterate";
  for (std::size_t k = 0; k < n; ++k) csv << ",p" << k;
  csv << ",g";
  for (std::size_t k = 0; k < n; ++k) csv << ",dg_dp" << k;
  csv << "\n";
  json iterates = json::array();
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    const auto& it = r.history[i];
    csv << i;
    for (double v : it.p) csv << "," << v;
    csv << "," << it.g;
    for (double v : it.gradient) csv << "," << v;
    csv << "\n";
    iterates.push_back({{"p", it.p}, {"g", it.g}, {"gradient", it.gradient}});
  }
  s["optimizer"] = {{"pStar", r.p},           {"gStar", r.g},       {"acceptedSteps", r.acceptedSteps},
                    {"converged", r.converged}, {"failed", r.failed}, {"message", r.message},
                    {"iterates", iterates}};
  s["g"] = r.g;
  objective.resetWarmStart();
  out.solution(problem.mesh(), objective.solve(r.p));

  const std::size_t sweepPoints = c.getSize("shape", "sweepPoints");
  int code = r.failed ? 1 : 0;
  if (sweepPoints >= 2) {
    const std::vector<double> others(r.p.begin() + 1, r.p.end());
    const ContinuationProblem cp = shapeContinuation(problem, morph, others, newton);
    cp.setParameter(lower[0]);
    const auto x0 = solveState(problem, newton).x;
    const ContinuationResult sweep = continuation(cp, lower[0], upper[0], sweepPoints, x0);
    auto sc = out.open("sweep.csv");
    sc << "p,g\n";
    std::size_t best = 0;
    for (std::size_t i = 0; i < sweep.points.size(); ++i) {
      sc << sweep.points[i].p << "," << sweep.points[i].g << "\n";
      if (sweep.points[i].g < sweep.points[best].g) best = i;
    }
    const double spacing = (upper[0] - lower[0]) / static_cast<double>(sweepPoints - 1);
    const double argmin = sweep.points.empty() ? 0.0 : sweep.points[best].p;
    s["sweep"] = {{"complete", sweep.complete},
                  {"spacing", spacing},
                  {"argmin", argmin},
                  {"bracketsOptimum", sweep.complete && std::abs(argmin - r.p[0]) <= spacing}};
    if (!sweep.complete) code = 1;
  }
  return code;
}

inline int runUq(const RunConfig& c, ThermoElectricProblem& problem, const Output& out, json& s) {
  const std::string name = c.getString("uq", "parameter");
  if (!problem.parameters().has(name)) throw ConfigError("uq.parameter: unknown model parameter '" + name + "'");
  const std::size_t degree = c.getSize("uq", "degree");
  const std::vector<double> expansion = c.getList("uq", "expansion");
  if (expansion.empty() || expansion.size() > degree + 1)
    throw ConfigError("uq.expansion: needs between 1 and degree + 1 coefficients");
  const std::map<std::string, std::vector<double>> uncertain{{name, expansion}};
  const auto basis = buildBasisData(degree);
  SGSolverConfig cfg;
  const NewtonConfig newton = newtonConfigOf(c);
  cfg.absTol = newton.absTol;
  cfg.relTol = newton.relTol;
  cfg.maxIters = newton.maxIters;
  cfg.deterministic = newton;
  const SGResult sg = sgNewtonSolve(problem, basis, uncertain, cfg);
  const std::size_t dof = objectiveMaxTemperature(sg.x[0]).dof;

  json sgs = {{"parameter", name},
              {"expansion", expansion},
              {"degree", degree},
              {"iterations", sg.iterations},
              {"linearIterations", sg.linearIterations},
              {"finalResidualNorm", sg.history.back()},
              {"tMaxDof", dof}};
  std::vector<double> coeffs;
  for (std::size_t k = 0; k < basis->size(); ++k) coeffs.push_back(sg.x[k][dof]);
  sgs["tMaxCoefficients"] = coeffs;

  std::optional<SgNispComparison> cmp;
  if (const std::size_t order = c.getSize("uq", "nispOrder"); order > 0) {
    cmp = compareWithNisp(problem, *basis, sg, uncertain, order);
    sgs["nispOrder"] = order;
    sgs["nispCoefficients"] = cmp->nisp;
    sgs["coefficientRelativeError"] = cmp->coefficientRelativeError;
    sgs["normalizedError"] = cmp->normalizedError;
  }
  s["sg"] = sgs;
  s["g"] = coeffs.front();

  auto csv = out.open("sg_coefficients.csv");
  csv << "k,sg" << (cmp ? ",nisp,relativeError" : "") << "\n";
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    csv << k << "," << coeffs[k];
    if (cmp) csv << "," << cmp->nisp[k] << "," << cmp->coefficientRelativeError[k];
    csv << "\n";
  }
  auto t = out.open("sg_temperature.csv");
  t << "nodeId";
  for (std::size_t k = 0; k < basis->size(); ++k) t << ",T" << k;
  t << "\n";
  for (std::size_t node = 0; node < problem.mesh().numNodes(); ++node) {
    t << node;
    for (std::size_t k = 0; k < basis->size(); ++k) t << "," << sg.x[k][2 * node + 1];
    t << "\n";
  }
  out.solution(problem.mesh(), sg.x[0], "solution_mean");
  out.history(sg.history, "sg_history.csv");
  return 0;
}

inline int runVerify(const RunConfig& c, ThermoElectricProblem& problem, const Output& out, json& s) {
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, double value, double tolerance, bool pass) {
    checks.push_back({{"check", name}, {"value", value}, {"tolerance", tolerance}, {"pass", pass}});
    all = all && pass;
  };

  std::mt19937_64 rng(c.getSize("verify", "seed"));
  const double jacTol = c.getDouble("verify", "jacobianTolerance");
  double jacWorst = 0.0;
  std::vector<double> first;
  for (std::size_t i = 0; i < c.getSize("verify", "states"); ++i) {
    const auto x = randomState(problem, rng);
    if (first.empty()) first = x;
    jacWorst = std::max(jacWorst, checkJacobianFd(problem, x).maxRelativeError);
  }
  if (first.empty()) first = randomState(problem, rng);
  record("jacobian_fd", jacWorst, jacTol, jacWorst <= jacTol);

  const double tanTol = c.getDouble("verify", "tangentTolerance");
  for (const std::string name : {"Alpha", "Beta", "Pad Conductivity"}) {
    const double e = checkParameterTangentFd(problem, first, {name}).front();
    record("tangent_fd " + name, e, tanTol, e <= tanTol);
  }
  MultiVector v(problem.numDofs(), 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t col = 0; col < 2; ++col)
    for (std::size_t i = 0; i < problem.numDofs(); ++i) v(i, col) = u(rng);
  const double dir = checkDirectionalTangent(problem, first, v);
  record("directional_tangent", dir, 1e-12, dir <= 1e-12);

  std::vector<std::size_t> sizes;
  for (double n : c.getList("verify", "mmsSizes")) sizes.push_back(static_cast<std::size_t>(n));
  const MmsStudy mms = manufacturedSolutionStudy(sizes);
  const double mmsTol = c.getDouble("verify", "mmsOrderTolerance");
  for (std::size_t i = 0; i < mms.orders.size(); ++i)
    record("mms_order " + std::to_string(sizes[i]) + "-" + std::to_string(sizes[i + 1]), mms.orders[i], mmsTol,
           std::abs(mms.orders[i] - 2.0) <= mmsTol);

  if (c.getBool("verify", "sg")) {
    const std::string name = c.getString("uq", "parameter");
    const SgNispComparison cmp = compareSgNisp(problem, c.getSize("uq", "degree"), c.getSize("uq", "nispOrder"),
                                               {{name, c.getList("uq", "expansion")}});
    const double tol = c.getDouble("verify", "sgTolerance");
    record("sg_vs_nisp", cmp.normalizedError, tol, cmp.normalizedError <= tol);
  }

  auto csv = out.open("verify.csv");
  csv << "check,value,tolerance,pass\n";
  for (const auto& ch : checks)
    csv << ch["check"].get<std::string>() << "," << ch["value"].get<double>() << "," << ch["tolerance"].get<double>()
        << "," << (ch["pass"].get<bool>() ? "PASS" : "FAIL") << "\n";
  s["verify"] = {{"allPassed", all}, {"checks", checks}};
  return all ? 0 : 1;
}

}  // namespace detail

/// Runs one configured analysis and writes its artifacts. Config errors
/// give exit code 2, numerical failures 1.
inline RunOutcome run(const RunConfig& c, const RunOptions& opts = {}) {
  std::ostream& log = *opts.log;
  RunOutcome outcome;
  json& s = outcome.summary;
  const std::string mode = c.getString("run", "mode");
  s["mode"] = mode;
  s["version"] = kVersion;
  const detail::Output out(c.getString("run", "output"));
  auto finish = [&](int code, const std::string& message) {
    outcome.exitCode = code;
    s["status"] = code == 0 ? "ok" : code == 2 ? "config error" : "failed";
    if (!message.empty()) s["message"] = message;
    s["config"] = c.effective();
    try {
      auto os = out.open("summary.json");
      os << s.dump(2) << "\n";
    } catch (const Error& e) {
      log << "error: " << e.what() << "\n";
    }
    return outcome;
  };

  try {
    ThermoElectricProblem problem(meshOf(c), problemOptionsOf(c));
    for (const auto& name : problem.parameters().names())
      detail::setParameterOrThrow(problem, name, c.getDouble("parameters", name));
    s["mesh"] = {{"nodes", problem.mesh().numNodes()},
                 {"elements", problem.mesh().numElements()},
                 {"dofs", problem.numDofs()}};
    const double pe = problem.maxPeclet();
    s["maxPeclet"] = pe;
    s["warnings"] = json::array();
    if (pe > 1.0) {
      const std::string w = "element Peclet number " + std::to_string(pe) +
                            " exceeds 1; the Galerkin convection term may oscillate";
      log << "warning: " << w << "\n";
      s["warnings"].push_back(w);
    }
    if (opts.dumpGraph) {
      for (EvalTag tag : {EvalTag::Residual, EvalTag::Jacobian, EvalTag::Tangent, EvalTag::ShapeTangent,
                          EvalTag::SGResidual, EvalTag::SGJacobian}) {
        auto dot = out.open(std::string("graph_") + evalTagName(tag) + ".dot");
        dot << problem.dumpGraph(tag, true);
        auto txt = out.open(std::string("graph_") + evalTagName(tag) + ".txt");
        txt << problem.dumpGraph(tag, false);
      }
    }

    int code = 0;
    if (mode == "solve") detail::runSolve(c, problem, out, s);
    else if (mode == "continuation") code = detail::runContinuation(c, problem, out, s);
    else if (mode == "optimize") code = detail::runOptimize(c, problem, out, s, log);
    else if (mode == "uq") code = detail::runUq(c, problem, out, s);
    else code = detail::runVerify(c, problem, out, s);
    return finish(code, "");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return finish(2, e.what());
  } catch (const NumericalError& e) {
    log << "solver failure: " << e.what() << "\n";
    return finish(1, e.what());
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return finish(1, e.what());
  }
}

}  // namespace genfe::cli
