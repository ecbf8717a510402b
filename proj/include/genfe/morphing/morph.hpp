#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "genfe/assembly/linear_algebra.hpp"
#include "genfe/discretization/mesh.hpp"
#include "genfe/error.hpp"

namespace genfe {

enum class MorphMode {
  // p = {d}: top and bottom follow the same parabola d prof(t)
  OneParameter,
  // p = {d_top, d_bottom}: independent deflections plus an area-preserving
  // thickness bulge
  TwoParameter,
};

/// Parabolic profile 1 - (2t - 1)^2 on the full slider, t in [0, 1].
inline double morphProfile(double t) {
  const double s = 2.0 * t - 1.0;
  return 1.0 - s * s;
}

/// Deforms the slider region of a base mesh. Every call starts from the
/// base mesh, so the result depends on p only.
///
/// Slider nodes move vertically: with base height y0, strip height H and
/// boundary displacements dTop(t), dBottom(t),
///   y = y0 + dBottom + (y0 / H) (dTop - dBottom).
/// In the two-parameter mode
///   dTop    = d_t prof + (H/2)(s - 1) prof^2
///   dBottom = d_b prof - (H/2)(s - 1) prof^2
/// and s - 1 = -(d_t - d_b) A1 / (H A2), with A1, A2 the trapezoid sums of
/// prof and prof^2 over the slider node columns, which keeps the polygon
/// area of the slider fixed.
class SliderMorph {
 public:
  SliderMorph(Mesh base, const GeometryParams& geom, MorphMode mode)
      : base_(std::move(base)), mode_(mode), height_(geom.height),
        x0_(geom.conductorLength + geom.padLength), length_(2.0 * geom.sliderHalfLength) {
    const int slider = base_.regionId("slider");
    if (slider < 0) throw ConfigError("morph needs a mesh with a 'slider' region");
    std::set<std::size_t> nodes;
    for (std::size_t e = 0; e < base_.numElements(); ++e)
      if (base_.regionOf[e] == slider) nodes.insert(base_.connectivity[e].begin(), base_.connectivity[e].end());
    std::set<double> columns;
    for (auto n : nodes) {
      const auto& x = base_.coords[n];
      const double p = morphProfile((x[0] - x0_) / length_);
      nodes_.push_back({n, p, x[1] / height_});
      columns.insert(x[0]);
    }
    // trapezoid sums over the distinct node columns
    const std::vector<double> xs(columns.begin(), columns.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double pa = morphProfile((xs[i] - x0_) / length_);
      const double pb = morphProfile((xs[i + 1] - x0_) / length_);
      const double w = 0.5 * (xs[i + 1] - xs[i]);
      a1_ += w * (pa + pb);
      a2_ += w * (pa * pa + pb * pb);
    }
  }

  const Mesh& base() const { return base_; }
  MorphMode mode() const { return mode_; }
  std::size_t numParams() const { return mode_ == MorphMode::OneParameter ? 1 : 2; }

  /// Thickness scale s of the two-parameter mode.
  double thicknessScale(std::span<const double> p) const {
    if (mode_ == MorphMode::OneParameter) return 1.0;
    return 1.0 - (p[0] - p[1]) * a1_ / (height_ * a2_);
  }

  Mesh morph(std::span<const double> p) const {
    if (p.size() != numParams())
      throw UsageError("morph expects " + std::to_string(numParams()) + " shape parameters, got " +
                       std::to_string(p.size()));
    Mesh m = base_;
    const double dt = p[0];
    const double db = mode_ == MorphMode::OneParameter ? p[0] : p[1];
    const double bulge = 0.5 * height_ * (thicknessScale(p) - 1.0);
    for (const auto& n : nodes_) {
      const double top = dt * n.profile + bulge * n.profile * n.profile;
      const double bottom = db * n.profile - bulge * n.profile * n.profile;
      m.coords[n.id][1] = base_.coords[n.id][1] + (bottom + n.eta * (top - bottom));
    }
    checkOrientation(m);
    return m;
  }

  /// Central differences (morph(p + h e_k) - morph(p - h e_k)) / 2h; rows
  /// node * 2 + d. A non-positive `step` selects h = 1e-6 (1 + |p_k|).
  MultiVector sensitivity(std::span<const double> p, double step = 0.0) const {
    MultiVector xp(2 * base_.numNodes(), numParams());
    std::vector<double> q(p.begin(), p.end());
    for (std::size_t k = 0; k < numParams(); ++k) {
      const double h = step > 0.0 ? step : 1e-6 * (1.0 + std::abs(p[k]));
      q[k] = p[k] + h;
      const Mesh plus = morph(q);
      q[k] = p[k] - h;
      const Mesh minus = morph(q);
      q[k] = p[k];
      for (std::size_t n = 0; n < base_.numNodes(); ++n)
        for (std::size_t d = 0; d < 2; ++d)
          xp(2 * n + d, k) = (plus.coords[n][d] - minus.coords[n][d]) / (2.0 * h);
    }
    return xp;
  }

 private:
  struct SliderNode {
    std::size_t id;
    double profile;
    double eta;
  };

  static void checkOrientation(const Mesh& m) {
    for (std::size_t e = 0; e < m.numElements(); ++e) {
      const auto& c = m.connectivity[e];
      for (std::size_t i = 0; i < 4; ++i) {
        const auto& a = m.coords[c[i]];
        const auto& b = m.coords[c[(i + 1) % 4]];
        const auto& d = m.coords[c[(i + 3) % 4]];
        const double cross = (b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]);
        if (!(cross > 0.0)) throw DomainError("morph inverts element " + std::to_string(e));
      }
    }
  }

  Mesh base_;
  MorphMode mode_;
  double height_;
  double x0_;
  double length_;
  std::vector<SliderNode> nodes_;
  double a1_ = 0.0;
  double a2_ = 0.0;
};

}  // namespace genfe
