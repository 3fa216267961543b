#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "support.hpp"
#include "surfspin/io.hpp"
#include "surfspin/presets.hpp"
#include "surfspin/simd/kernels.hpp"

using namespace surfspin::simd;

namespace {

struct Cloud {
  std::vector<double> x, y, z, w;
  explicit Cloud(std::size_t n, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(-12.0, 12.0), p(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(u(g));
      y.push_back(u(g));
      z.push_back(u(g));
      w.push_back(p(g));
    }
  }
  Points points() const { return {x, y, z}; }
};

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar distance kernel") {
  std::vector<double> x{0, 1, 2}, y{0, 2, 0}, z{0, 0, 3}, out(3);
  const double o[3] = {1, 0, 0};
  scalar::distance_sq({x, y, z}, o, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 4.0);
  CHECK(out[2] == 10.0);
}

TEST_CASE("scalar dipole kernel on an axis") {
  std::vector<double> sx{0}, sy{0}, sz{0}, w{1};
  std::vector<double> nx{0}, ny{0}, nz{2}, pref{8};
  std::vector<double> xx(1), yy(1), zz(1), xy(1), xz(1), yz(1);
  scalar::point_dipole({{sx, sy, sz}, w}, {nx, ny, nz}, pref, {xx, yy, zz, xy, xz, yz});
  CHECK(xx[0] == doctest::Approx(-1.0));
  CHECK(yy[0] == doctest::Approx(-1.0));
  CHECK(zz[0] == doctest::Approx(2.0));
  CHECK(xy[0] == 0.0);
}

TEST_CASE("dispatch honours forcing") {
  const Isa detected = active_isa();
  force_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  force_isa(detected);
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(isa_name(Isa::Avx2) == "avx2");
}

#if defined(SURFSPIN_HAVE_AVX2)
TEST_CASE("AVX2 kernels agree bit for bit with the scalar reference") {
  if (!avx2_supported()) {
    MESSAGE("CPU lacks AVX2; vector variant not exercised");
    return;
  }
  auto g = support::rng(41);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 31u, 257u}) {
    CAPTURE(n);
    const Cloud c(n, g);
    const double o[3] = {0.3, -1.7, 2.2};
    std::vector<double> a(n), b(n);
    scalar::distance_sq(c.points(), o, a);
    avx2::distance_sq(c.points(), o, b);
    CHECK(same_bits(a, b));

    const Cloud sites(5, g);
    std::vector<double> pref(n, 79.064);
    std::vector<double> s[6], v[6];
    for (int k = 0; k < 6; ++k) s[k].assign(n, 0.0), v[k].assign(n, 0.0);
    scalar::point_dipole({sites.points(), sites.w}, c.points(), pref, {s[0], s[1], s[2], s[3], s[4], s[5]});
    avx2::point_dipole({sites.points(), sites.w}, c.points(), pref, {v[0], v[1], v[2], v[3], v[4], v[5]});
    for (int k = 0; k < 6; ++k) CHECK(same_bits(s[k], v[k]));
  }
}
#endif

TEST_CASE("step model is identical under either kernel set") {
  const Isa detected = active_isa();
  force_isa(Isa::Scalar);
  const std::string scalar_text =
      surfspin::io::emit_interchange(surfspin::presets::build_paper_step().terminated);
  force_isa(Isa::Avx2);
  const std::string vector_text =
      surfspin::io::emit_interchange(surfspin::presets::build_paper_step().terminated);
  force_isa(detected);
  CHECK(scalar_text == vector_text);
}

} // TEST_SUITE
