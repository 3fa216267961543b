#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "surfspin/crystal.hpp"
#include "surfspin/simd/kernels.hpp"

namespace surfspin::crystal::detail {

/// Calls visit(i, j, offset, d2, image) for every ordered pair (i, j) and
/// periodic image with |offset| < radius, where offset points from i to the
/// image of j. Self pairs are reported only for non-zero images.
template <class Visit>
void scan_pairs(const Structure& s, double radius, Visit&& visit) {
  const std::size_t n = s.atoms.size();
  if (n == 0) return;

  std::vector<double> x(n), y(n), z(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = s.atoms[i].position.x();
    y[i] = s.atoms[i].position.y();
    z[i] = s.atoms[i].position.z();
  }
  const simd::Points pts{x, y, z};

  // Image range per periodic axis from the perpendicular cell width.
  const double volume = std::abs(s.cell.volume());
  int reach[3] = {0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    if (!s.cell.periodic[a]) continue;
    const Vec3 face = s.cell.vectors[(a + 1) % 3].cross(s.cell.vectors[(a + 2) % 3]);
    const double width = volume / face.norm();
    reach[a] = static_cast<int>(std::ceil(radius / width)) + 1;
  }

  const double r2max = radius * radius;
  std::size_t image = 0;
  for (int ia = -reach[0]; ia <= reach[0]; ++ia) {
    for (int ib = -reach[1]; ib <= reach[1]; ++ib) {
      for (int ic = -reach[2]; ic <= reach[2]; ++ic, ++image) {
        const bool home = ia == 0 && ib == 0 && ic == 0;
        const Vec3 shift = ia * s.cell.vectors[0] + ib * s.cell.vectors[1] +
                           ic * s.cell.vectors[2];
        for (std::size_t i = 0; i < n; ++i) {
          const Vec3 origin_v = s.atoms[i].position - shift;
          const double origin[3] = {origin_v.x(), origin_v.y(), origin_v.z()};
          simd::distance_sq(pts, origin, d2);
          for (std::size_t j = 0; j < n; ++j) {
            if (d2[j] >= r2max || (home && j == i)) continue;
            const Vec3 offset = s.atoms[j].position + shift - s.atoms[i].position;
            visit(i, j, offset, d2[j], image);
          }
        }
      }
    }
  }
}

} // namespace surfspin::crystal::detail
