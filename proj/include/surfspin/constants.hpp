#pragma once

// Shared physical constants. Every module reads from here; nothing else
// hard-codes a gyromagnetic ratio or Boltzmann's constant.

namespace surfspin::constants {

inline constexpr double pi = 3.14159265358979323846;

inline constexpr double planck_J_s = 6.62607015e-34;
inline constexpr double mu0_over_4pi = 1.0e-7;           // T m / A
inline constexpr double boltzmann_eV_per_K = 8.617333262e-5;
inline constexpr double celsius_offset_K = 273.15;

inline constexpr double gamma_electron_MHz_per_T = 28024.9514;
inline constexpr double gamma_1H_MHz_per_T = 42.577478;
inline constexpr double gamma_13C_MHz_per_T = 10.7084;

inline constexpr double angstrom2_to_cm2 = 1.0e-16;

/// Point-dipole prefactor (mu0/4pi) h gamma_e gamma_n in MHz Å^3 for a nucleus
/// with gyromagnetic ratio gamma_n given in MHz/T.
///
/// Unit bookkeeping: gammas in Hz/T contribute 1e12, 1/r^3 in Å^-3 contributes
/// 1e30, and the result in Hz is scaled to MHz by 1e-6.
constexpr double dipolar_prefactor_MHz_A3(double gamma_n_MHz_per_T) {
  return mu0_over_4pi * planck_J_s * gamma_electron_MHz_per_T * gamma_n_MHz_per_T * 1.0e36;
}

// Ideal diamond and nominal terminator geometry (Å).
inline constexpr double diamond_lattice_A = 3.57;
inline constexpr double default_bond_cutoff_A = 1.85;
inline constexpr double min_separation_A = 0.7;
inline constexpr double bond_CH_A = 1.09;
inline constexpr double bond_CO_A = 1.43;
inline constexpr double bond_OH_A = 0.97;

} // namespace surfspin::constants
