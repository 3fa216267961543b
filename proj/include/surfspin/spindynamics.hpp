#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "surfspin/hyperfine.hpp"

namespace surfspin::spindynamics {

/// Secular S = 1/2, I = 1/2 pair; all entries in MHz.
struct SpinPairHamiltonian {
  double omega_S = 0.0;
  double omega_I = 0.0;
  double a = 0.0;
  double b = 0.0;
};

struct ManifoldFrequencies {
  double omega_alpha = 0.0;
  double omega_beta = 0.0;
  double k = 0.0; ///< modulation depth
};

/// gamma_n * B in MHz. Throws InputError for negative fields.
double larmor(const hyperfine::IsotopeSpec& isotope, double field_T);

/// omega_S Sz + omega_I Iz + a Sz Iz + b Sz Ix in the basis
/// |alpha alpha>, |alpha beta>, |beta alpha>, |beta beta> (electron first).
Eigen::Matrix4d build_hamiltonian(const SpinPairHamiltonian& h);

ManifoldFrequencies nuclear_frequencies(const SpinPairHamiltonian& h);

struct EchoSample {
  double tau_us = 0.0;
  double E = 1.0;
};

/// Coherent two-pulse echo envelope. Frequencies are linear (MHz), tau in us.
std::vector<EchoSample> two_pulse_eseem(const SpinPairHamiltonian& h,
                                        std::span<const double> tau_us);

} // namespace surfspin::spindynamics
