#include "surfspin/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace surfspin::simd {

namespace {

Isa detect() {
  if (const char* env = std::getenv("SURFSPIN_SIMD")) {
    if (std::string(env) == "scalar") return Isa::Scalar;
  }
  return avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& forced() {
  static std::atomic<int> value{-1};
  return value;
}

} // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
  case Isa::Scalar: return "scalar";
  case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool avx2_supported() {
#if defined(SURFSPIN_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  const int f = forced().load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Isa>(f);
  static const Isa detected = detect();
  return detected;
}

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
  forced().store(static_cast<int>(isa), std::memory_order_relaxed);
}

void distance_sq(Points p, const double origin[3], std::span<double> out) {
#if defined(SURFSPIN_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::distance_sq(p, origin, out);
#endif
  scalar::distance_sq(p, origin, out);
}

void point_dipole(WeightedPoints sites, Points nuclei, std::span<const double> prefactor,
                  TensorComponents out) {
#if defined(SURFSPIN_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::point_dipole(sites, nuclei, prefactor, out);
#endif
  scalar::point_dipole(sites, nuclei, prefactor, out);
}

} // namespace surfspin::simd
