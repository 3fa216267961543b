#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "surfspin/crystal.hpp"

namespace surfspin::hyperfine {

using Mat3 = Eigen::Matrix3d;

struct IsotopeSpec {
  std::string symbol;  ///< e.g. "1H"
  std::string element; ///< e.g. "H"
  double spin = 0.5;
  double gamma_MHz_per_T = 0.0;

  /// (mu0/4pi) h gamma_e gamma_n in MHz Å^3.
  double dipolar_prefactor() const;
};

const IsotopeSpec& isotope_1H();
const IsotopeSpec& isotope_13C();
/// Lookup by symbol ("1H", "13C").
std::optional<IsotopeSpec> find_isotope(std::string_view symbol);
/// Magnetic isotope scanned for an element, if any.
std::optional<IsotopeSpec> isotope_for_element(std::string_view element);

struct SpinSite {
  Vec3 position = Vec3::Zero();
  double population = 1.0;
};

struct SpinCenter {
  std::vector<SpinSite> sites;

  static SpinCenter single(const Vec3& position);
  /// Throws InputError unless populations are non-negative and sum to 1.
  void validate() const;
};

struct HyperfineTensor {
  Mat3 A = Mat3::Zero();
  double a_iso = 0.0;

  Mat3 dipolar() const { return A - a_iso * Mat3::Identity(); }
};

struct SecularPair {
  double a = 0.0;
  double b = 0.0;
};

struct GeometrySolution {
  double r = 0.0;         ///< Å
  double theta_deg = 0.0; ///< angle between field and electron-nucleus axis
  double residual = 0.0;  ///< |forward(r, theta) - input|, MHz
};

/// Point-dipole tensor in MHz. Throws SingularityError if the nucleus is within
/// 0.1 Å of a spin site.
Mat3 dipolar_tensor(const SpinCenter& center, const Vec3& nucleus, const IsotopeSpec& isotope);

HyperfineTensor total_tensor(const Mat3& dipolar, double a_iso);

/// a = A_ZZ and b = sqrt(A_ZX^2 + A_ZY^2) in a frame with Z along the field.
SecularPair secular_couplings(const HyperfineTensor& tensor, const Vec3& field_dir);

/// Axial single-site couplings for distance r (Å) and angle theta (deg).
SecularPair forward_ab(double r, double theta_deg, double a_iso, const IsotopeSpec& isotope);

/// Every (r, theta) consistent with the measured pair, best residual first.
/// Returns an empty list when no physical geometry exists.
std::vector<GeometrySolution> fit_geometry(double a, double b, double a_iso,
                                           const IsotopeSpec& isotope);

struct ScanRow {
  std::size_t atom = 0;
  std::string element;
  std::string isotope;
  double a = 0.0;
  double b = 0.0;
  bool flagged = false;
};

/// Couplings for every H and C nucleus, in atom order. The nearest periodic
/// image of each nucleus to the first spin site is used. Rows with
/// max(|a|, b) >= threshold are flagged.
std::vector<ScanRow> scan_structure(const crystal::Structure& s, const SpinCenter& center,
                                    const Vec3& field_dir,
                                    const std::map<std::size_t, double>& a_iso,
                                    double threshold);

} // namespace surfspin::hyperfine
