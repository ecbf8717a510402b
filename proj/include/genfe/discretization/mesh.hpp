#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "genfe/error.hpp"

namespace genfe {

/// 2D quadrilateral mesh. Element nodes are counterclockwise; elements of
/// one region are numbered contiguously.
struct Mesh {
  std::vector<std::array<double, 2>> coords;
  std::vector<std::array<std::size_t, 4>> connectivity;
  std::vector<int> regionOf;
  std::vector<std::string> regionNames;
  std::map<std::string, std::vector<std::size_t>> nodeSets;

  std::size_t numNodes() const { return coords.size(); }
  std::size_t numElements() const { return connectivity.size(); }

  int regionId(const std::string& name) const {
    for (std::size_t r = 0; r < regionNames.size(); ++r)
      if (regionNames[r] == name) return static_cast<int>(r);
    return -1;
  }

  const std::string& regionName(int id) const { return regionNames.at(static_cast<std::size_t>(id)); }

  const std::vector<std::size_t>& nodeSet(const std::string& name) const {
    auto it = nodeSets.find(name);
    if (it == nodeSets.end()) throw ConfigError("unknown node set '" + name + "'");
    return it->second;
  }
};

/// Dimensions of the half-domain conductor / pad / slider strip. The
/// symmetry plane is the right edge, at the middle of the slider.
struct GeometryParams {
  double conductorLength = 1.0;
  double padLength = 0.25;
  double sliderHalfLength = 0.75;
  double height = 2.0;
};

/// Elements across each region and through the height.
struct SliderResolution {
  std::size_t conductor = 8;
  std::size_t pad = 2;
  std::size_t slider = 6;
  std::size_t height = 16;
};

namespace detail {

struct Band {
  std::string region;
  double length;
  std::size_t elements;
};

// Structured mesh of vertical bands sharing one row structure. Nodes are
// numbered row by row; elements band by band so each region is contiguous.
inline Mesh buildBands(const std::vector<Band>& bands, double height, std::size_t rows) {
  if (!(height > 0.0)) throw ConfigError("mesh height must be positive");
  if (rows == 0) throw ConfigError("mesh needs at least one element through the height");
  std::size_t columns = 0;
  for (const auto& b : bands) {
    if (!(b.length > 0.0)) throw ConfigError("region '" + b.region + "' has non-positive length");
    if (b.elements == 0) throw ConfigError("region '" + b.region + "' needs at least one element");
    columns += b.elements;
  }
  Mesh mesh;
  std::vector<double> xs{0.0};
  double x0 = 0.0;
  for (const auto& b : bands) {
    for (std::size_t i = 1; i <= b.elements; ++i)
      xs.push_back(x0 + b.length * static_cast<double>(i) / static_cast<double>(b.elements));
    x0 += b.length;
  }
  const std::size_t nx = columns + 1;
  for (std::size_t j = 0; j <= rows; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      mesh.coords.push_back({xs[i], height * static_cast<double>(j) / static_cast<double>(rows)});
  auto node = [nx](std::size_t i, std::size_t j) { return j * nx + i; };

  std::size_t firstColumn = 0;
  for (const auto& b : bands) {
    int region = mesh.regionId(b.region);
    if (region < 0) {
      region = static_cast<int>(mesh.regionNames.size());
      mesh.regionNames.push_back(b.region);
    }
    for (std::size_t j = 0; j < rows; ++j)
      for (std::size_t i = firstColumn; i < firstColumn + b.elements; ++i) {
        mesh.connectivity.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});
        mesh.regionOf.push_back(region);
      }
    firstColumn += b.elements;
  }
  for (std::size_t j = 0; j <= rows; ++j) {
    mesh.nodeSets["left"].push_back(node(0, j));
    mesh.nodeSets["right"].push_back(node(columns, j));
  }
  for (std::size_t i = 0; i < nx; ++i) {
    mesh.nodeSets["bottom"].push_back(node(i, 0));
    mesh.nodeSets["top"].push_back(node(i, rows));
  }
  return mesh;
}

}  // namespace detail

/// Single-region lx x ly rectangle with nx x ny elements.
inline Mesh buildRectangleMesh(double lx, double ly, std::size_t nx, std::size_t ny,
                               const std::string& region = "conductor") {
  return detail::buildBands({{region, lx, nx}}, ly, ny);
}

/// Conductor, pad and half slider side by side. Node sets:
/// left_conductor_end, symmetry_plane, pad_interface (the pad/slider
/// boundary) and slider_interior (slider nodes right of the interface),
/// plus the generic left/right/bottom/top.
inline Mesh buildSliderMesh(const GeometryParams& geom, const SliderResolution& res) {
  Mesh mesh = detail::buildBands({{"conductor", geom.conductorLength, res.conductor},
                                  {"pad", geom.padLength, res.pad},
                                  {"slider", geom.sliderHalfLength, res.slider}},
                                 geom.height, res.height);
  const std::size_t nx = res.conductor + res.pad + res.slider + 1;
  const std::size_t interface = res.conductor + res.pad;
  mesh.nodeSets["left_conductor_end"] = mesh.nodeSets["left"];
  mesh.nodeSets["symmetry_plane"] = mesh.nodeSets["right"];
  for (std::size_t j = 0; j <= res.height; ++j) {
    mesh.nodeSets["pad_interface"].push_back(j * nx + interface);
    for (std::size_t i = interface + 1; i < nx; ++i) mesh.nodeSets["slider_interior"].push_back(j * nx + i);
  }
  return mesh;
}

}  // namespace genfe
