#include "surfspin/simd/kernels.hpp"

#include <cmath>

namespace surfspin::simd::scalar {

void distance_sq(Points p, const double origin[3], std::span<double> out) {
  const std::size_t n = p.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = p.x[j] - origin[0];
    const double dy = p.y[j] - origin[1];
    const double dz = p.z[j] - origin[2];
    out[j] = dx * dx + dy * dy + dz * dz;
  }
}

void point_dipole(WeightedPoints sites, Points nuclei, std::span<const double> prefactor,
                  TensorComponents out) {
  const std::size_t n = nuclei.size();
  const std::size_t m = sites.points.size();
  for (std::size_t j = 0; j < n; ++j) {
    double txx = 0.0, tyy = 0.0, tzz = 0.0, txy = 0.0, txz = 0.0, tyz = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double dx = nuclei.x[j] - sites.points.x[k];
      const double dy = nuclei.y[j] - sites.points.y[k];
      const double dz = nuclei.z[j] - sites.points.z[k];
      const double r2 = dx * dx + dy * dy + dz * dz;
      const double f = sites.weight[k] / (r2 * r2 * std::sqrt(r2));
      txx += f * (3.0 * dx * dx - r2);
      tyy += f * (3.0 * dy * dy - r2);
      tzz += f * (3.0 * dz * dz - r2);
      txy += f * (3.0 * dx * dy);
      txz += f * (3.0 * dx * dz);
      tyz += f * (3.0 * dy * dz);
    }
    const double c = prefactor[j];
    out.xx[j] = c * txx;
    out.yy[j] = c * tyy;
    out.zz[j] = c * tzz;
    out.xy[j] = c * txy;
    out.xz[j] = c * txz;
    out.yz[j] = c * tyz;
  }
}

} // namespace surfspin::simd::scalar
