#include "surfspin/hyperfine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "surfspin/error.hpp"
#include "surfspin/simd/kernels.hpp"

namespace surfspin::hyperfine {

namespace {

constexpr double min_site_distance_A = 0.1;
constexpr double deg = constants::pi / 180.0;

void require_angle(double theta_deg) {
  if (!(theta_deg >= 0.0 && theta_deg <= 90.0)) {
    throw InputError("theta must lie in [0, 90] degrees");
  }
}

// Forward couplings and their derivatives with respect to (r, theta_rad).
struct Forward {
  double a, b;
  double da_dr, da_dt, db_dr, db_dt;
};

Forward forward_with_jacobian(double r, double t, double a_iso, double prefactor) {
  const double T = prefactor / (r * r * r);
  const double c = std::cos(t);
  const double s = std::sin(t);
  Forward f{};
  f.a = a_iso + T * (3.0 * c * c - 1.0);
  f.b = 3.0 * T * s * c;
  f.da_dr = -3.0 / r * T * (3.0 * c * c - 1.0);
  f.db_dr = -3.0 / r * f.b;
  f.da_dt = -6.0 * T * s * c;
  f.db_dt = 3.0 * T * (c * c - s * s);
  return f;
}

GeometrySolution polish(double r, double t, double a, double b, double a_iso, double prefactor) {
  auto residual = [&](double rr, double tt) {
    const Forward f = forward_with_jacobian(rr, tt, a_iso, prefactor);
    return std::hypot(f.a - a, f.b - b);
  };
  double best = residual(r, t);
  for (int it = 0; it < 8 && best > 0.0; ++it) {
    const Forward f = forward_with_jacobian(r, t, a_iso, prefactor);
    const double det = f.da_dr * f.db_dt - f.da_dt * f.db_dr;
    if (std::abs(det) < 1e-300) break;
    const double ea = f.a - a;
    const double eb = f.b - b;
    const double nr = r - (f.db_dt * ea - f.da_dt * eb) / det;
    const double nt = t - (-f.db_dr * ea + f.da_dr * eb) / det;
    if (!(nr > 0.0) || nt < 0.0 || nt > constants::pi / 2.0) break;
    const double res = residual(nr, nt);
    if (!(res < best)) break;
    r = nr;
    t = nt;
    best = res;
  }
  return {r, t / deg, best};
}

} // namespace

double IsotopeSpec::dipolar_prefactor() const {
  return constants::dipolar_prefactor_MHz_A3(gamma_MHz_per_T);
}

const IsotopeSpec& isotope_1H() {
  static const IsotopeSpec spec{"1H", "H", 0.5, constants::gamma_1H_MHz_per_T};
  return spec;
}

const IsotopeSpec& isotope_13C() {
  static const IsotopeSpec spec{"13C", "C", 0.5, constants::gamma_13C_MHz_per_T};
  return spec;
}

std::optional<IsotopeSpec> find_isotope(std::string_view symbol) {
  if (symbol == "1H") return isotope_1H();
  if (symbol == "13C") return isotope_13C();
  return std::nullopt;
}

std::optional<IsotopeSpec> isotope_for_element(std::string_view element) {
  if (element == "H") return isotope_1H();
  if (element == "C") return isotope_13C();
  return std::nullopt;
}

SpinCenter SpinCenter::single(const Vec3& position) { return SpinCenter{{{position, 1.0}}}; }

void SpinCenter::validate() const {
  if (sites.empty()) throw InputError("spin center has no sites");
  double sum = 0.0;
  for (const SpinSite& s : sites) {
    if (!(s.population >= 0.0)) throw InputError("spin populations must be non-negative");
    sum += s.population;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw InputError("spin populations sum to " + std::to_string(sum) + ", expected 1");
  }
}

Mat3 dipolar_tensor(const SpinCenter& center, const Vec3& nucleus, const IsotopeSpec& isotope) {
  center.validate();
  const double prefactor = isotope.dipolar_prefactor();
  Mat3 total = Mat3::Zero();
  for (const SpinSite& site : center.sites) {
    const Vec3 d = nucleus - site.position;
    const double r = d.norm();
    if (r < min_site_distance_A) {
      throw SingularityError("nucleus lies within 0.1 Å of a spin site");
    }
    const Vec3 u = d / r;
    total += site.population * prefactor / (r * r * r) *
             (3.0 * u * u.transpose() - Mat3::Identity());
  }
  return total;
}

HyperfineTensor total_tensor(const Mat3& dipolar, double a_iso) {
  return {a_iso * Mat3::Identity() + dipolar, a_iso};
}

SecularPair secular_couplings(const HyperfineTensor& tensor, const Vec3& field_dir) {
  const double norm = field_dir.norm();
  if (!(norm > 1e-12)) throw InputError("field direction must be non-zero");
  const Vec3 z = field_dir / norm;
  const Vec3 Az = tensor.A * z;
  const double a = z.dot(Az);
  return {a, (Az - a * z).norm()};
}

SecularPair forward_ab(double r, double theta_deg, double a_iso, const IsotopeSpec& isotope) {
  if (!(r > min_site_distance_A)) throw InputError("r must exceed 0.1 Å");
  require_angle(theta_deg);
  const Forward f = forward_with_jacobian(r, theta_deg * deg, a_iso, isotope.dipolar_prefactor());
  return {f.a, f.b};
}

std::vector<GeometrySolution> fit_geometry(double a, double b, double a_iso,
                                           const IsotopeSpec& isotope) {
  if (!(b >= 0.0)) throw InputError("b must be non-negative");
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(a_iso)) {
    throw InputError("couplings must be finite");
  }
  const double prefactor = isotope.dipolar_prefactor();
  const double ad = a - a_iso;
  std::vector<GeometrySolution> out;

  if (b == 0.0) {
    // Only the axis endpoints give b = 0 with T > 0.
    if (ad > 0.0) out.push_back(polish(std::cbrt(prefactor / (ad / 2.0)), 0.0, a, b, a_iso, prefactor));
    if (ad < 0.0) out.push_back(polish(std::cbrt(prefactor / -ad), constants::pi / 2.0, a, b, a_iso, prefactor));
    return out;
  }

  // In the doubled angle phi = 2 theta the pair reads
  //   a' = T (1 + 3 cos phi) / 2,   b = (3 T / 2) sin phi,
  // so a' sin phi - b cos phi = b / 3, i.e. R sin(phi - delta) = b / 3.
  // The second branch phi = delta + pi - alpha always exceeds pi.
  const double R = std::hypot(ad, b);
  const double delta = std::atan2(b, ad);
  const double alpha = std::asin(b / (3.0 * R));
  const double phi = delta + alpha;
  if (!(phi < constants::pi)) return out;
  const double T = 2.0 * b / (3.0 * std::sin(phi));
  out.push_back(polish(std::cbrt(prefactor / T), phi / 2.0, a, b, a_iso, prefactor));

  std::sort(out.begin(), out.end(), [](const GeometrySolution& l, const GeometrySolution& r) {
    return l.residual != r.residual ? l.residual < r.residual : l.r < r.r;
  });
  return out;
}

std::vector<ScanRow> scan_structure(const crystal::Structure& s, const SpinCenter& center,
                                    const Vec3& field_dir,
                                    const std::map<std::size_t, double>& a_iso,
                                    double threshold) {
  center.validate();
  if (!(field_dir.norm() > 1e-12)) throw InputError("field direction must be non-zero");

  std::vector<ScanRow> rows;
  std::vector<double> nx, ny, nz, prefactor;
  const Vec3 anchor = center.sites.front().position;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    const auto iso = isotope_for_element(s.atoms[i].species);
    if (!iso) continue;
    const Vec3 p = anchor + s.cell.minimum_image(s.atoms[i].position - anchor);
    for (const SpinSite& site : center.sites) {
      if ((p - site.position).norm() < min_site_distance_A) {
        throw SingularityError("atom " + std::to_string(i) + " coincides with a spin site");
      }
    }
    nx.push_back(p.x());
    ny.push_back(p.y());
    nz.push_back(p.z());
    prefactor.push_back(iso->dipolar_prefactor());
    rows.push_back({i, s.atoms[i].species, iso->symbol, 0.0, 0.0, false});
  }

  std::vector<double> sx, sy, sz, w;
  for (const SpinSite& site : center.sites) {
    sx.push_back(site.position.x());
    sy.push_back(site.position.y());
    sz.push_back(site.position.z());
    w.push_back(site.population);
  }
  const std::size_t n = rows.size();
  std::vector<double> xx(n), yy(n), zz(n), xy(n), xz(n), yz(n);
  simd::point_dipole({{sx, sy, sz}, w}, {nx, ny, nz}, prefactor, {xx, yy, zz, xy, xz, yz});

  for (std::size_t j = 0; j < n; ++j) {
    Mat3 dip;
    dip << xx[j], xy[j], xz[j], xy[j], yy[j], yz[j], xz[j], yz[j], zz[j];
    const auto it = a_iso.find(rows[j].atom);
    const SecularPair ab =
        secular_couplings(total_tensor(dip, it == a_iso.end() ? 0.0 : it->second), field_dir);
    rows[j].a = ab.a;
    rows[j].b = ab.b;
    rows[j].flagged = std::max(std::abs(ab.a), ab.b) >= threshold;
  }
  return rows;
}

} // namespace surfspin::hyperfine
