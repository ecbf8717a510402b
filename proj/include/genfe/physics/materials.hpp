#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "genfe/discretization/mesh.hpp"
#include "genfe/error.hpp"

namespace genfe {

/// Material data of one region.
struct Material {
  double sigma0 = 100.0;
  double kappa = 1.0;
  std::array<double, 2> velocity{0.0, 0.0};
  double beta = 0.2;
  double T0 = 0.0;
  // when set, sigma0 is read from this model parameter
  std::string sigma0Parameter;
};

/// Materials keyed by region name.
class MaterialTable {
 public:
  void set(const std::string& region, Material m) {
    if (!(m.sigma0 > 0.0) && m.sigma0Parameter.empty())
      throw ConfigError("region '" + region + "': electrical conductivity must be positive");
    if (!(m.kappa > 0.0)) throw ConfigError("region '" + region + "': thermal conductivity must be positive");
    table_[region] = std::move(m);
  }

  const Material& get(const std::string& region) const {
    auto it = table_.find(region);
    if (it == table_.end()) throw ConfigError("no material for region '" + region + "'");
    return it->second;
  }

  bool has(const std::string& region) const { return table_.count(region) > 0; }

  /// Materials in mesh region order; every region must be covered.
  std::vector<Material> forMesh(const Mesh& mesh) const {
    std::vector<Material> out;
    for (const auto& r : mesh.regionNames) out.push_back(get(r));
    return out;
  }

  /// Conductor and slider at sigma0 = 100, pad through "Pad Conductivity";
  /// velocity (-10, 0) in the conductor only. With the convective term
  /// -(v . grad T) the transport direction is -v, so conductor material
  /// enters at the far end (x = 0).
  static MaterialTable sliderDefaults() {
    MaterialTable t;
    Material conductor;
    conductor.velocity = {-10.0, 0.0};
    t.set("conductor", conductor);
    Material pad;
    pad.sigma0Parameter = "Pad Conductivity";
    t.set("pad", pad);
    t.set("slider", Material{});
    return t;
  }

 private:
  std::map<std::string, Material> table_;
};

/// Largest element Peclet number |v| h / (2 kappa), h the longest edge.
inline double maxElementPeclet(const Mesh& mesh, const std::vector<Material>& byRegion) {
  double worst = 0.0;
  for (std::size_t e = 0; e < mesh.numElements(); ++e) {
    const Material& m = byRegion.at(static_cast<std::size_t>(mesh.regionOf[e]));
    const double speed = std::hypot(m.velocity[0], m.velocity[1]);
    if (speed == 0.0) continue;
    double h = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const auto& a = mesh.coords[mesh.connectivity[e][i]];
      const auto& b = mesh.coords[mesh.connectivity[e][(i + 1) % 4]];
      h = std::max(h, std::hypot(b[0] - a[0], b[1] - a[1]));
    }
    worst = std::max(worst, speed * h / (2.0 * m.kappa));
  }
  return worst;
}

}  // namespace genfe
