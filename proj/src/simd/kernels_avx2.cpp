#include "surfspin/simd/kernels.hpp"

#include <immintrin.h>

namespace surfspin::simd::avx2 {

namespace {
constexpr std::size_t lanes = 4;
}

void distance_sq(Points p, const double origin[3], std::span<double> out) {
  const std::size_t n = p.size();
  const __m256d ox = _mm256_set1_pd(origin[0]);
  const __m256d oy = _mm256_set1_pd(origin[1]);
  const __m256d oz = _mm256_set1_pd(origin[2]);
  std::size_t j = 0;
  for (; j + lanes <= n; j += lanes) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(&p.x[j]), ox);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(&p.y[j]), oy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(&p.z[j]), oz);
    __m256d acc = _mm256_mul_pd(dx, dx);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(dy, dy));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(dz, dz));
    _mm256_storeu_pd(&out[j], acc);
  }
  for (; j < n; ++j) {
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
  const __m256d three = _mm256_set1_pd(3.0);
  std::size_t j = 0;
  for (; j + lanes <= n; j += lanes) {
    const __m256d nx = _mm256_loadu_pd(&nuclei.x[j]);
    const __m256d ny = _mm256_loadu_pd(&nuclei.y[j]);
    const __m256d nz = _mm256_loadu_pd(&nuclei.z[j]);
    __m256d txx = _mm256_setzero_pd(), tyy = _mm256_setzero_pd(), tzz = _mm256_setzero_pd();
    __m256d txy = _mm256_setzero_pd(), txz = _mm256_setzero_pd(), tyz = _mm256_setzero_pd();
    for (std::size_t k = 0; k < m; ++k) {
      const __m256d dx = _mm256_sub_pd(nx, _mm256_set1_pd(sites.points.x[k]));
      const __m256d dy = _mm256_sub_pd(ny, _mm256_set1_pd(sites.points.y[k]));
      const __m256d dz = _mm256_sub_pd(nz, _mm256_set1_pd(sites.points.z[k]));
      __m256d r2 = _mm256_mul_pd(dx, dx);
      r2 = _mm256_add_pd(r2, _mm256_mul_pd(dy, dy));
      r2 = _mm256_add_pd(r2, _mm256_mul_pd(dz, dz));
      const __m256d denom = _mm256_mul_pd(_mm256_mul_pd(r2, r2), _mm256_sqrt_pd(r2));
      const __m256d f = _mm256_div_pd(_mm256_set1_pd(sites.weight[k]), denom);
      const __m256d x3 = _mm256_mul_pd(three, dx);
      const __m256d y3 = _mm256_mul_pd(three, dy);
      const __m256d z3 = _mm256_mul_pd(three, dz);
      txx = _mm256_add_pd(txx, _mm256_mul_pd(f, _mm256_sub_pd(_mm256_mul_pd(x3, dx), r2)));
      tyy = _mm256_add_pd(tyy, _mm256_mul_pd(f, _mm256_sub_pd(_mm256_mul_pd(y3, dy), r2)));
      tzz = _mm256_add_pd(tzz, _mm256_mul_pd(f, _mm256_sub_pd(_mm256_mul_pd(z3, dz), r2)));
      txy = _mm256_add_pd(txy, _mm256_mul_pd(f, _mm256_mul_pd(x3, dy)));
      txz = _mm256_add_pd(txz, _mm256_mul_pd(f, _mm256_mul_pd(x3, dz)));
      tyz = _mm256_add_pd(tyz, _mm256_mul_pd(f, _mm256_mul_pd(y3, dz)));
    }
    const __m256d c = _mm256_loadu_pd(&prefactor[j]);
    _mm256_storeu_pd(&out.xx[j], _mm256_mul_pd(c, txx));
    _mm256_storeu_pd(&out.yy[j], _mm256_mul_pd(c, tyy));
    _mm256_storeu_pd(&out.zz[j], _mm256_mul_pd(c, tzz));
    _mm256_storeu_pd(&out.xy[j], _mm256_mul_pd(c, txy));
    _mm256_storeu_pd(&out.xz[j], _mm256_mul_pd(c, txz));
    _mm256_storeu_pd(&out.yz[j], _mm256_mul_pd(c, tyz));
  }
  if (j < n) {
    const std::size_t rest = n - j;
    Points tail{nuclei.x.subspan(j, rest), nuclei.y.subspan(j, rest), nuclei.z.subspan(j, rest)};
    TensorComponents tail_out{out.xx.subspan(j, rest), out.yy.subspan(j, rest),
                              out.zz.subspan(j, rest), out.xy.subspan(j, rest),
                              out.xz.subspan(j, rest), out.yz.subspan(j, rest)};
    scalar::point_dipole(sites, tail, prefactor.subspan(j, rest), tail_out);
  }
}

} // namespace surfspin::simd::avx2
