#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>

#include "genfe/discretization/mesh.hpp"
#include "genfe/error.hpp"

namespace genfe {

/// Plain-text mesh: node count then `x y` lines, element count then
/// `n0 n1 n2 n3 region` lines, then node sets as `set name count ids...`.
inline void writeMesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  os << mesh.numNodes() << "\n";
  for (const auto& x : mesh.coords) os << x[0] << " " << x[1] << "\n";
  os << mesh.numElements() << "\n";
  for (std::size_t e = 0; e < mesh.numElements(); ++e) {
    const auto& c = mesh.connectivity[e];
    os << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << " " << mesh.regionName(mesh.regionOf[e]) << "\n";
  }
  for (const auto& [name, ids] : mesh.nodeSets) {
    os << "set " << name << " " << ids.size();
    for (auto id : ids) os << " " << id;
    os << "\n";
  }
}

inline Mesh readMesh(std::istream& is) {
  Mesh mesh;
  auto fail = [](const std::string& what) { throw ConfigError("malformed mesh file: " + what); };
  std::size_t nodes = 0;
  if (!(is >> nodes)) fail("missing node count");
  mesh.coords.resize(nodes);
  for (auto& x : mesh.coords)
    if (!(is >> x[0] >> x[1])) fail("truncated node list");
  std::size_t elems = 0;
  if (!(is >> elems)) fail("missing element count");
  for (std::size_t e = 0; e < elems; ++e) {
    std::array<std::size_t, 4> c{};
    std::string region;
    if (!(is >> c[0] >> c[1] >> c[2] >> c[3] >> region)) fail("truncated element list");
    for (auto id : c)
      if (id >= nodes) fail("element " + std::to_string(e) + " references node " + std::to_string(id));
    int r = mesh.regionId(region);
    if (r < 0) {
      r = static_cast<int>(mesh.regionNames.size());
      mesh.regionNames.push_back(region);
    }
    mesh.connectivity.push_back(c);
    mesh.regionOf.push_back(r);
  }
  std::string keyword;
  while (is >> keyword) {
    if (keyword != "set") fail("unexpected token '" + keyword + "'");
    std::string name;
    std::size_t count = 0;
    if (!(is >> name >> count)) fail("bad node set header");
    auto& ids = mesh.nodeSets[name];
    ids.resize(count);
    for (auto& id : ids)
      if (!(is >> id) || id >= nodes) fail("bad node id in set '" + name + "'");
  }
  return mesh;
}

inline void writeMeshFile(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  writeMesh(os, mesh);
}

inline Mesh readMeshFile(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read '" + path + "'");
  return readMesh(is);
}

/// `nodeId,x,y,psi,T` for an interleaved two-equation solution.
inline void writeSolutionCsv(std::ostream& os, const Mesh& mesh, std::span<const double> x) {
  if (x.size() != 2 * mesh.numNodes()) throw UsageError("solution size does not match mesh");
  os.precision(17);
  os << "nodeId,x,y,psi,T\n";
  for (std::size_t n = 0; n < mesh.numNodes(); ++n)
    os << n << "," << mesh.coords[n][0] << "," << mesh.coords[n][1] << "," << x[2 * n] << "," << x[2 * n + 1] << "\n";
}

/// Legacy ASCII VTK unstructured grid with point data psi and T and the
/// region id as cell data.
inline void writeVtk(std::ostream& os, const Mesh& mesh, std::span<const double> x) {
  if (x.size() != 2 * mesh.numNodes()) throw UsageError("solution size does not match mesh");
  os.precision(17);
  os << "# vtk DataFile Version 3.0\ngenfe solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.numNodes() << " double\n";
  for (const auto& p : mesh.coords) os << p[0] << " " << p[1] << " 0\n";
  os << "CELLS " << mesh.numElements() << " " << 5 * mesh.numElements() << "\n";
  for (const auto& c : mesh.connectivity) os << "4 " << c[0] << " " << c[1] << " " << c[2] << " " << c[3] << "\n";
  os << "CELL_TYPES " << mesh.numElements() << "\n";
  for (std::size_t e = 0; e < mesh.numElements(); ++e) os << "9\n";
  os << "CELL_DATA " << mesh.numElements() << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (int r : mesh.regionOf) os << r << "\n";
  os << "POINT_DATA " << mesh.numNodes() << "\n";
  os << "SCALARS psi double 1\nLOOKUP_TABLE default\n";
  for (std::size_t n = 0; n < mesh.numNodes(); ++n) os << x[2 * n] << "\n";
  os << "SCALARS T double 1\nLOOKUP_TABLE default\n";
  for (std::size_t n = 0; n < mesh.numNodes(); ++n) os << x[2 * n + 1] << "\n";
}

}  // namespace genfe
