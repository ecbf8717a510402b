#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "genfe/analysis/continuation.hpp"
#include "genfe/analysis/optimizer.hpp"
#include "genfe/error.hpp"
#include "genfe/physics/problem.hpp"

namespace genfe::cli {

struct ConfigKey {
  std::string section;
  std::string key;
  std::optional<std::string> defaultValue;  // empty: required
  std::string help;
};

inline std::string formatValue(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}
inline std::string formatValue(std::size_t v) { return std::to_string(v); }
inline std::string formatValue(bool v) { return v ? "true" : "false"; }

/// Every recognized configuration key; defaults are read from the library's
/// default option structs. [dirichlet] is free-form and not listed:
/// `<potential|temperature>.<node set> = value`.
inline const std::vector<ConfigKey>& configSchema() {
  static const std::vector<ConfigKey> schema = [] {
    std::vector<ConfigKey> k;
    auto add = [&](const std::string& section, const std::string& key, std::optional<std::string> def,
                   const std::string& help) { k.push_back({section, key, std::move(def), help}); };
    const AssemblerOptions assembler;
    const GeometryParams geom;
    const SliderResolution res;
    const ProblemOptions problem;
    const NewtonConfig newton;
    const LinearSolverConfig linear;
    const ContinuationConfig cont;
    const OptimizerConfig opt;

    add("run", "mode", std::nullopt, "solve | continuation | optimize | uq | verify");
    add("run", "output", "out", "output directory");
    add("run", "threads", formatValue(assembler.threads), "assembly worker threads");
    add("run", "worksetSize", formatValue(assembler.worksetSize), "elements per workset");

    add("mesh", "type", "slider", "slider | rectangle");
    add("mesh", "conductorLength", formatValue(geom.conductorLength), "slider mesh: conductor length");
    add("mesh", "padLength", formatValue(geom.padLength), "slider mesh: pad length");
    add("mesh", "sliderHalfLength", formatValue(geom.sliderHalfLength), "slider mesh: half slider length");
    add("mesh", "height", formatValue(geom.height), "strip height (both mesh types)");
    add("mesh", "conductorElements", formatValue(res.conductor), "slider mesh: element columns in the conductor");
    add("mesh", "padElements", formatValue(res.pad), "slider mesh: element columns in the pad");
    add("mesh", "sliderElements", formatValue(res.slider), "slider mesh: element columns in the slider");
    add("mesh", "heightElements", formatValue(res.height), "slider mesh: element rows");
    add("mesh", "width", "1", "rectangle mesh: width");
    add("mesh", "nx", "8", "rectangle mesh: element columns");
    add("mesh", "ny", "8", "rectangle mesh: element rows");

    for (const char* region : {"conductor", "pad", "slider"}) {
      const Material& m = problem.materials.get(region);
      add(region, "sigma0", formatValue(m.sigma0), "electrical conductivity at T0");
      add(region, "kappa", formatValue(m.kappa), "thermal conductivity");
      add(region, "velocityX", formatValue(m.velocity[0]), "convective velocity x");
      add(region, "velocityY", formatValue(m.velocity[1]), "convective velocity y");
      add(region, "beta", formatValue(m.beta), "conductivity temperature coefficient");
      add(region, "T0", formatValue(m.T0), "reference temperature");
      add(region, "sigma0Parameter", m.sigma0Parameter, "model parameter that supplies sigma0 (empty: none)");
    }

    add("model", "jouleHeating", formatValue(problem.jouleHeating), "Joule source in the heat equation");
    add("model", "manufacturedSource", formatValue(problem.manufacturedSource),
        "add the sin(pi x) sin(pi y) manufactured forcing");
    add("model", "quadOrder", formatValue(problem.quadOrder), "Gauss points per direction");

    add("parameters", "Alpha", formatValue(problem.alpha), "source term constant");
    add("parameters", "Beta", formatValue(problem.beta), "source term T^2 coefficient");
    add("parameters", "Pad Conductivity", formatValue(problem.padConductivity), "pad sigma0");

    add("solver", "absTol", formatValue(newton.absTol), "Newton absolute residual tolerance");
    add("solver", "relTol", formatValue(newton.relTol), "Newton tolerance relative to the initial residual");
    add("solver", "maxIters", formatValue(newton.maxIters), "Newton iteration limit");
    add("solver", "maxBacktracks", formatValue(newton.maxBacktracks), "step halvings per Newton iteration");
    add("solver", "linear", "auto", "auto | dense | gmres");
    add("solver", "gmresTolerance", formatValue(linear.tolerance), "GMRES relative tolerance");
    add("solver", "writeMatrix", "false", "write jacobian.mtx and residual.mtx at the solution");

    add("continuation", "parameter", "Pad Conductivity", "model parameter name, or 'shape'");
    add("continuation", "from", "20", "first value");
    add("continuation", "to", "50", "last value");
    add("continuation", "points", "7", "number of values, both ends included");
    add("continuation", "maxBisections", formatValue(cont.maxBisections), "step bisections before giving up");

    add("shape", "parameters", "1", "1 (matched deflection) or 2 (top, bottom)");
    add("shape", "initial", "0.2", "comma separated start values");
    add("shape", "lower", "-0.3", "comma separated lower bounds");
    add("shape", "upper", "0.3", "comma separated upper bounds");
    add("shape", "tolerance", formatValue(opt.tolerance), "projected gradient tolerance");
    add("shape", "maxIterations", formatValue(opt.maxIterations), "optimizer iteration limit");
    add("shape", "sweepPoints", "0", "optimize mode: points of a check sweep over the first parameter (0: none)");

    add("uq", "parameter", "Pad Conductivity", "uncertain model parameter");
    add("uq", "expansion", "35,15", "comma separated Legendre coefficients");
    add("uq", "degree", "3", "stochastic basis degree");
    add("uq", "nispOrder", "6", "quadrature points of the NISP check (0: no check)");

    add("verify", "states", "5", "random states of the Jacobian check");
    add("verify", "seed", "1", "random seed");
    add("verify", "mmsSizes", "8,16,32", "manufactured solution mesh sizes");
    add("verify", "jacobianTolerance", "1e-6", "AD vs FD Jacobian");
    add("verify", "tangentTolerance", "1e-6", "AD vs FD parameter tangents");
    add("verify", "mmsOrderTolerance", "0.15", "allowed distance of the L2 order from 2");
    add("verify", "sgTolerance", "1e-3", "SG vs NISP normalized coefficient error");
    add("verify", "sg", "true", "run the SG vs NISP check");
    return k;
  }();
  return schema;
}

/// Sections a mode needs in the config file or overrides.
inline std::vector<std::string> requiredSections(const std::string& mode) {
  std::vector<std::string> s{"run", "mesh"};
  if (mode == "continuation") s.push_back("continuation");
  if (mode == "optimize") s.push_back("shape");
  if (mode == "uq") s.push_back("uq");
  return s;
}

/// `--help` text: every key with its default.
inline std::string schemaHelp() {
  std::ostringstream os;
  os << "Config keys ([section] key = default):\n";
  std::string section;
  for (const auto& k : configSchema()) {
    if (section != k.section) {
      section = k.section;
      os << "  [" << section << "]\n";
    }
    os << "    " << k.key << " = " << k.defaultValue.value_or("(required)") << "    " << k.help << "\n";
  }
  os << "  [dirichlet]\n    <potential|temperature>.<node set> = value    "
        "(slider mesh default: psi = T = 0 on left_conductor_end, psi = 0.5 on symmetry_plane)\n";
  return os.str();
}

/// Parsed config with overrides applied; lookups fall back to the schema
/// defaults.
class RunConfig {
 public:
  static RunConfig fromString(const std::string& text, const std::vector<std::string>& overrides = {}) {
    RunConfig c;
    boost::property_tree::ptree tree;
    std::istringstream is(text);
    try {
      boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    // the ini reader drops sections without keys; they still count as present
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      const auto open = line.find_first_not_of(" \t");
      const auto close = line.find(']');
      if (open != std::string::npos && line[open] == '[' && close != std::string::npos)
        c.values_[line.substr(open + 1, close - open - 1)];
    }
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty())
        throw ConfigError("config: key '" + section + "' outside of a section");
      auto& s = c.values_[section];
      for (const auto& [key, value] : body) s[key] = value.data();
    }
    for (const auto& o : overrides) c.applyOverride(o);
    c.validate();
    return c;
  }

  static RunConfig fromFile(const std::string& path, const std::vector<std::string>& overrides = {}) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream text;
    text << is.rdbuf();
    return fromString(text.str(), overrides);
  }

  bool hasSection(const std::string& s) const { return values_.count(s) > 0; }

  std::string getString(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    if (s != values_.end()) {
      auto k = s->second.find(key);
      if (k != s->second.end()) return k->second;
    }
    const ConfigKey* def = find(section, key);
    if (!def) throw UsageError("config key " + section + "." + key + " is not in the schema");
    if (!def->defaultValue) throw ConfigError("missing required key " + section + "." + key);
    return *def->defaultValue;
  }

  double getDouble(const std::string& section, const std::string& key) const {
    return parseDouble(getString(section, key), section + "." + key);
  }

  std::size_t getSize(const std::string& section, const std::string& key) const {
    const std::string v = getString(section, key);
    std::size_t out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
      throw ConfigError(section + "." + key + ": '" + v + "' is not a non-negative integer");
    return out;
  }

  bool getBool(const std::string& section, const std::string& key) const {
    const std::string v = getString(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(section + "." + key + ": '" + v + "' is not a boolean");
  }

  std::vector<double> getList(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(getString(section, key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parseDouble(item, section + "." + key));
    return out;
  }

  /// Entries of a free-form section in key order.
  const std::map<std::string, std::string>& section(const std::string& s) const {
    static const std::map<std::string, std::string> empty;
    auto it = values_.find(s);
    return it == values_.end() ? empty : it->second;
  }

  /// Effective value of every schema key plus the free-form sections.
  std::map<std::string, std::map<std::string, std::string>> effective() const {
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const auto& k : configSchema())
      if (k.defaultValue || hasKey(k.section, k.key)) out[k.section][k.key] = getString(k.section, k.key);
    for (const auto& [key, value] : section("dirichlet")) out["dirichlet"][key] = value;
    return out;
  }

 private:
  static const ConfigKey* find(const std::string& section, const std::string& key) {
    for (const auto& k : configSchema())
      if (section == k.section && key == k.key) return &k;
    return nullptr;
  }

  bool hasKey(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    return s != values_.end() && s->second.count(key);
  }

  static double parseDouble(std::string v, const std::string& what) {
    v.erase(0, v.find_first_not_of(" \t"));
    v.erase(v.find_last_not_of(" \t") + 1);
    double out = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size())
      throw ConfigError(what + ": '" + v + "' is not a number");
    return out;
  }

  void applyOverride(const std::string& o) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    values_[o.substr(0, dot)][o.substr(dot + 1, eq - dot - 1)] = o.substr(eq + 1);
  }

  void validate() const {
    for (const auto& [section, body] : values_) {
      if (section == "dirichlet") continue;
      bool known = false;
      for (const auto& k : configSchema()) known = known || section == k.section;
      if (!known) throw ConfigError("unknown config section [" + section + "]");
      for (const auto& [key, value] : body)
        if (!find(section, key)) throw ConfigError("unknown config key " + section + "." + key);
    }
    if (!hasSection("run")) throw ConfigError("missing required section [run]");
    const std::string mode = getString("run", "mode");
    const std::vector<std::string> modes{"solve", "continuation", "optimize", "uq", "verify"};
    if (std::find(modes.begin(), modes.end(), mode) == modes.end())
      throw ConfigError("run.mode: unknown mode '" + mode + "'");
    for (const auto& s : requiredSections(mode))
      if (!hasSection(s)) throw ConfigError("mode '" + mode + "' needs section [" + s + "]");
  }

  std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace genfe::cli
