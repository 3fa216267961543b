#include "surfspin/spindynamics.hpp"

#include <cmath>

#include "surfspin/error.hpp"

namespace surfspin::spindynamics {

double larmor(const hyperfine::IsotopeSpec& isotope, double field_T) {
  if (!(field_T >= 0.0)) throw InputError("magnetic field must be non-negative");
  return isotope.gamma_MHz_per_T * field_T;
}

Eigen::Matrix4d build_hamiltonian(const SpinPairHamiltonian& h) {
  Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
  const double zs = h.omega_S / 2.0;
  const double zi = h.omega_I / 2.0;
  const double zz = h.a / 4.0;
  H(0, 0) = zs + zi + zz;
  H(1, 1) = zs - zi - zz;
  H(2, 2) = -zs + zi - zz;
  H(3, 3) = -zs - zi + zz;
  H(0, 1) = H(1, 0) = h.b / 4.0;
  H(2, 3) = H(3, 2) = -h.b / 4.0;
  return H;
}

ManifoldFrequencies nuclear_frequencies(const SpinPairHamiltonian& h) {
  ManifoldFrequencies f;
  f.omega_alpha = std::hypot(h.omega_I + h.a / 2.0, h.b / 2.0);
  f.omega_beta = std::hypot(h.omega_I - h.a / 2.0, h.b / 2.0);
  if (f.omega_alpha > 0.0 && f.omega_beta > 0.0) {
    const double ratio = h.b * h.omega_I / (f.omega_alpha * f.omega_beta);
    f.k = ratio * ratio;
  }
  return f;
}

std::vector<EchoSample> two_pulse_eseem(const SpinPairHamiltonian& h,
                                        std::span<const double> tau_us) {
  if (tau_us.empty()) throw InputError("tau grid is empty");
  for (std::size_t i = 0; i < tau_us.size(); ++i) {
    if (!(tau_us[i] >= 0.0)) throw InputError("tau must be non-negative");
    if (i > 0 && !(tau_us[i] > tau_us[i - 1])) {
      throw InputError("tau grid must be strictly increasing");
    }
  }
  const ManifoldFrequencies f = nuclear_frequencies(h);
  const double two_pi = 2.0 * constants::pi;
  std::vector<EchoSample> out;
  out.reserve(tau_us.size());
  for (double tau : tau_us) {
    // 2 - 2cos A - 2cos B + cos(A-B) + cos(A+B) = 2 (1 - cos A)(1 - cos B)
    const double ca = 1.0 - std::cos(two_pi * f.omega_alpha * tau);
    const double cb = 1.0 - std::cos(two_pi * f.omega_beta * tau);
    out.push_back({tau, 1.0 - f.k / 2.0 * ca * cb});
  }
  return out;
}

} // namespace surfspin::spindynamics
