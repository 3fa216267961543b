#include <doctest.h>

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "support.hpp"
#include "surfspin/error.hpp"
#include "surfspin/spindynamics.hpp"

using namespace surfspin;
using namespace surfspin::spindynamics;

using namespace oracle;

TEST_SUITE("spindynamics") {

TEST_CASE("larmor frequencies") {
  CHECK(larmor(hyperfine::isotope_1H(), 1.0) == doctest::Approx(42.5775).epsilon(1e-6));
  CHECK(larmor(hyperfine::isotope_13C(), 0.5) == doctest::Approx(5.3542).epsilon(1e-5));
  CHECK(larmor(hyperfine::isotope_13C(), 0.0) == 0.0);
  CHECK_THROWS_AS(larmor(hyperfine::isotope_1H(), -1.0), InputError);
}

TEST_CASE("hamiltonian structure") {
  CHECK(build_hamiltonian({}).isZero(0.0));
  const auto d = build_hamiltonian({0, 10, 4, 0});
  CHECK(d.isDiagonal(0.0));
  CHECK(d(0, 0) == doctest::Approx(5 + 1));
  CHECK(d(1, 1) == doctest::Approx(-5 - 1));
  CHECK(d(2, 2) == doctest::Approx(5 - 1));
  CHECK(d(3, 3) == doctest::Approx(-5 + 1));
  const auto h = build_hamiltonian({100, 10, 4, 2});
  CHECK(std::abs(h.trace()) < 1e-12);
  CHECK(h == h.transpose());
}

TEST_CASE("manifold frequencies") {
  auto f = nuclear_frequencies({0, 10, 0, 0});
  CHECK(f.omega_alpha == 10.0);
  CHECK(f.omega_beta == 10.0);
  CHECK(f.k == 0.0);
  f = nuclear_frequencies({0, 10, 4, 2});
  CHECK(f.omega_alpha == doctest::Approx(12.0416).epsilon(1e-5));
  CHECK(f.omega_beta == doctest::Approx(8.0623).epsilon(1e-5));
  CHECK(f.k == doctest::Approx(0.0424).epsilon(1e-2));
  f = nuclear_frequencies({0, 0, 4, 2});
  CHECK(f.omega_alpha == doctest::Approx(std::sqrt(5.0)));
  CHECK(f.omega_beta == doctest::Approx(std::sqrt(5.0)));
  CHECK(f.k == 0.0);
}

TEST_CASE("closed-form frequencies match diagonalisation") {
  auto g = support::rng(21);
  std::uniform_real_distribution<double> u(-30.0, 30.0), pos(0.0, 40.0);
  for (int i = 0; i < 100; ++i) {
    const SpinPairHamiltonian h{pos(g), pos(g), u(g), std::abs(u(g))};
    const auto f = nuclear_frequencies(h);
    const auto [ga, gb] = eigen_gaps(h);
    CHECK(std::abs(f.omega_alpha - ga) < 1e-9);
    CHECK(std::abs(f.omega_beta - gb) < 1e-9);
    CHECK(f.k >= 0.0);
    CHECK(f.k <= 1.0);
  }
}

TEST_CASE("echo formula matches density-matrix propagation") {
  const SpinPairHamiltonian h{0, 10, 4, 2};
  const double tau = 0.1;
  const auto e = two_pulse_eseem(h, std::vector<double>{tau});
  CHECK(std::abs(e[0].E - propagated_echo(h, tau)) < 1e-8);

  auto g = support::rng(22);
  std::uniform_real_distribution<double> u(-20.0, 20.0), pos(0.0, 30.0), t(0.0, 2.0);
  for (int i = 0; i < 30; ++i) {
    const SpinPairHamiltonian hr{pos(g), pos(g), u(g), std::abs(u(g))};
    const double tr = t(g);
    CHECK(std::abs(two_pulse_eseem(hr, std::vector<double>{tr})[0].E - propagated_echo(hr, tr)) <
          1e-8);
  }
}

TEST_CASE("echo bounds and limits") {
  std::vector<double> grid;
  for (int i = 0; i < 400; ++i) grid.push_back(0.005 * i);
  const SpinPairHamiltonian h{0, 3, 5, 4};
  const double k = nuclear_frequencies(h).k;
  const auto trace = two_pulse_eseem(h, grid);
  CHECK(trace[0].E == 1.0);
  for (const auto& s : trace) {
    CHECK(s.E <= 1.0);
    CHECK(s.E >= 1.0 - 2.0 * k);
  }
  for (const auto& s : two_pulse_eseem({0, 10, 4, 0}, grid)) CHECK(s.E == 1.0);
  CHECK(nuclear_frequencies({0, 10, 4, 1e-6}).k < 1e-13);
}

TEST_CASE("sign of a swaps the manifolds") {
  auto g = support::rng(23);
  std::uniform_real_distribution<double> u(0.1, 20.0);
  std::vector<double> grid{0.0, 0.07, 0.31, 0.9};
  for (int i = 0; i < 20; ++i) {
    const double wi = u(g), a = u(g), b = u(g);
    const auto p = nuclear_frequencies({0, wi, a, b});
    const auto m = nuclear_frequencies({0, wi, -a, b});
    CHECK(p.omega_alpha == doctest::Approx(m.omega_beta));
    CHECK(p.omega_beta == doctest::Approx(m.omega_alpha));
    CHECK(p.k == doctest::Approx(m.k));
    const auto ep = two_pulse_eseem({0, wi, a, b}, grid);
    const auto em = two_pulse_eseem({0, wi, -a, b}, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(ep[k].E == doctest::Approx(em[k].E));
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(two_pulse_eseem({0, 1, 1, 1}, std::vector<double>{}), InputError);
  CHECK_THROWS_AS(two_pulse_eseem({0, 1, 1, 1}, std::vector<double>{0.1, 0.1}), InputError);
  CHECK_THROWS_AS(two_pulse_eseem({0, 1, 1, 1}, std::vector<double>{-0.1}), InputError);
}

} // TEST_SUITE
