#pragma once

// Data-parallel inner loops shared by the neighbour search and the hyperfine
// scan. Each kernel has a scalar reference and an AVX2 variant; the active one
// is picked once at runtime from CPUID, or forced with SURFSPIN_SIMD=scalar.
// Both variants evaluate the same operation sequence without FMA contraction,
// so they agree bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace surfspin::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);
bool avx2_supported();
Isa active_isa();
/// Pins dispatch to `isa` for the rest of the process; used by equivalence tests.
void force_isa(Isa isa);

/// Structure-of-arrays view of points.
struct Points {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> z;

  std::size_t size() const { return x.size(); }
};

/// Weighted point spins; `weight` is the population.
struct WeightedPoints {
  Points points;
  std::span<const double> weight;
};

/// Six independent components of a symmetric 3x3 tensor per target.
struct TensorComponents {
  std::span<double> xx, yy, zz, xy, xz, yz;
};

/// out[j] = |p_j - origin|^2
void distance_sq(Points p, const double origin[3], std::span<double> out);

/// For every nucleus j:
///   T_j = prefactor[j] * sum_k w_k (3 d d^T - |d|^2 I) / |d|^5,  d = nucleus_j - site_k
/// Accumulates over sites in order k = 0..n-1.
void point_dipole(WeightedPoints sites, Points nuclei, std::span<const double> prefactor,
                  TensorComponents out);

namespace scalar {
void distance_sq(Points p, const double origin[3], std::span<double> out);
void point_dipole(WeightedPoints sites, Points nuclei, std::span<const double> prefactor,
                  TensorComponents out);
} // namespace scalar

#if defined(SURFSPIN_HAVE_AVX2)
namespace avx2 {
void distance_sq(Points p, const double origin[3], std::span<double> out);
void point_dipole(WeightedPoints sites, Points nuclei, std::span<const double> prefactor,
                  TensorComponents out);
} // namespace avx2
#endif

} // namespace surfspin::simd
