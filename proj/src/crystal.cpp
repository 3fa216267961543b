#include "surfspin/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Geometry>

#include "internal/pair_scan.hpp"
#include "surfspin/error.hpp"

namespace surfspin::crystal {

namespace {

constexpr double ideal_cc_bond(double a) { return a * 1.7320508075688772 / 4.0; }

constexpr double reference_cc_bond = ideal_cc_bond(constants::diamond_lattice_A);

// Terminator bonds are recognised up to 10% beyond their nominal length. At
// ideal lattice positions a hydroxyl O sits about 1.59 Å from the carbon next
// to its host, so the margin has to stay below ~11%.
constexpr double terminator_cutoff_factor = 1.1;

double nominal_bond(std::string_view a, std::string_view b) {
  auto is = [&](std::string_view x, std::string_view y) {
    return (a == x && b == y) || (a == y && b == x);
  };
  if (is("C", "C")) return reference_cc_bond;
  if (is("C", "H")) return constants::bond_CH_A;
  if (is("C", "O")) return constants::bond_CO_A;
  if (is("O", "H")) return constants::bond_OH_A;
  return 0.0;
}

} // namespace

std::string_view role_name(Role role) {
  switch (role) {
  case Role::Bulk: return "bulk";
  case Role::Surface: return "surface";
  case Role::TerminatorH: return "terminator-H";
  case Role::TerminatorOBridge: return "terminator-O-bridge";
  case Role::TerminatorOH: return "terminator-OH";
  case Role::FloatingC: return "floating-C";
  case Role::DbHost: return "db-host";
  }
  return "bulk";
}

std::optional<Role> parse_role(std::string_view name) {
  for (Role r : {Role::Bulk, Role::Surface, Role::TerminatorH, Role::TerminatorOBridge,
                 Role::TerminatorOH, Role::FloatingC, Role::DbHost}) {
    if (role_name(r) == name) return r;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Cell

Eigen::Matrix3d Cell::matrix() const {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i) m.col(i) = vectors[i];
  return m;
}

double Cell::volume() const { return vectors[0].dot(vectors[1].cross(vectors[2])); }

Vec3 Cell::to_fractional(const Vec3& r) const { return matrix().partialPivLu().solve(r); }

Vec3 Cell::wrap(const Vec3& r) const {
  Vec3 f = to_fractional(r);
  for (int i = 0; i < 3; ++i) {
    if (periodic[i]) {
      f[i] -= std::floor(f[i]);
      if (f[i] >= 1.0) f[i] = 0.0;
    }
  }
  return matrix() * f;
}

Vec3 Cell::minimum_image(const Vec3& d) const {
  Vec3 f = to_fractional(d);
  for (int i = 0; i < 3; ++i) {
    if (periodic[i]) f[i] -= std::round(f[i]);
  }
  return matrix() * f;
}

double Cell::in_plane_area() const {
  std::vector<int> axes;
  for (int i = 0; i < 3; ++i) {
    if (periodic[i]) axes.push_back(i);
  }
  if (axes.size() != 2) axes = {0, 1};
  return vectors[axes[0]].cross(vectors[axes[1]]).norm();
}

void Cell::validate() const {
  if (!(volume() > 1e-9)) {
    throw GeometryError("cell vectors are linearly dependent or left-handed (volume " +
                        std::to_string(volume()) + ")");
  }
}

bool Cell::operator==(const Cell& other) const {
  for (int i = 0; i < 3; ++i) {
    if (vectors[i] != other.vectors[i] || periodic[i] != other.periodic[i]) return false;
  }
  return true;
}

bool Atom::operator==(const Atom& other) const {
  return species == other.species && position == other.position && role == other.role;
}

bool Structure::operator==(const Structure& other) const {
  return bond_cutoff == other.bond_cutoff && cell == other.cell && atoms == other.atoms;
}

std::size_t Structure::count(std::string_view species) const {
  return static_cast<std::size_t>(std::count_if(
      atoms.begin(), atoms.end(), [&](const Atom& a) { return a.species == species; }));
}

// ---------------------------------------------------------------------------
// Bonding

int valence(std::string_view species) {
  if (species == "C") return 4;
  if (species == "O") return 2;
  if (species == "H") return 1;
  throw InputError("unsupported species '" + std::string(species) + "'");
}

double pair_cutoff(const Structure& s, std::string_view a, std::string_view b) {
  if (a == "C" && b == "C") return s.bond_cutoff;
  return terminator_cutoff_factor * nominal_bond(a, b);
}

void validate(const Structure& s) {
  s.cell.validate();
  for (const Atom& a : s.atoms) valence(a.species);

  const double min_sep = constants::min_separation_A;
  std::optional<std::pair<std::size_t, std::size_t>> clash;
  double closest = 0.0;
  detail::scan_pairs(s, min_sep, [&](std::size_t i, std::size_t j, const Vec3&, double d2, std::size_t) {
    if (!clash && d2 < min_sep * min_sep) {
      clash = {i, j};
      closest = std::sqrt(d2);
    }
  });
  if (clash) {
    std::ostringstream msg;
    msg << "atoms " << clash->first << " and " << clash->second << " are " << closest
        << " Å apart (minimum " << min_sep << " Å)";
    throw GeometryError(msg.str());
  }

  const Adjacency adj = neighbor_list(s);
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    if (s.atoms[i].species == "C" && adj[i].size() > 4) {
      throw GeometryError("carbon " + std::to_string(i) + " has " +
                          std::to_string(adj[i].size()) + " neighbours");
    }
  }
}

Adjacency neighbor_list(const Structure& s) {
  const std::size_t n = s.atoms.size();
  // Species-pair cutoffs, indexed by a compact species code.
  std::vector<int> code(n);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = std::find(names.begin(), names.end(), s.atoms[i].species);
    if (it == names.end()) {
      names.push_back(s.atoms[i].species);
      it = names.end() - 1;
    }
    code[i] = static_cast<int>(it - names.begin());
  }
  const std::size_t ns = names.size();
  std::vector<double> cut2(ns * ns);
  double max_cut = 0.0;
  for (std::size_t a = 0; a < ns; ++a) {
    for (std::size_t b = 0; b < ns; ++b) {
      const double c = pair_cutoff(s, names[a], names[b]);
      cut2[a * ns + b] = c * c;
      max_cut = std::max(max_cut, c);
    }
  }

  struct Hit {
    std::size_t j;
    std::size_t image;
    Vec3 offset;
  };
  std::vector<std::vector<Hit>> hits(n);
  detail::scan_pairs(s, max_cut,
                     [&](std::size_t i, std::size_t j, const Vec3& offset, double d2,
                         std::size_t image) {
                       if (d2 < cut2[static_cast<std::size_t>(code[i]) * ns +
                                     static_cast<std::size_t>(code[j])]) {
                         hits[i].push_back({j, image, offset});
                       }
                     });

  Adjacency adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(hits[i].begin(), hits[i].end(), [](const Hit& l, const Hit& r) {
      return l.j != r.j ? l.j < r.j : l.image < r.image;
    });
    adj[i].reserve(hits[i].size());
    for (const Hit& h : hits[i]) adj[i].push_back({h.j, h.offset});
  }
  return adj;
}

// ---------------------------------------------------------------------------
// Dangling bonds

int DbReport::total() const {
  return std::accumulate(entries.begin(), entries.end(), 0,
                         [](int acc, const DbEntry& e) { return acc + e.db_count; });
}

const DbEntry* DbReport::find(std::size_t atom) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const DbEntry& e) { return e.atom == atom; });
  return it == entries.end() ? nullptr : &*it;
}

DbReport enumerate_dbs(const Structure& s) { return enumerate_dbs(s, neighbor_list(s)); }

DbReport enumerate_dbs(const Structure& s, const Adjacency& adjacency) {
  DbReport report;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    const int coordination = static_cast<int>(adjacency[i].size());
    const int db = std::max(0, valence(s.atoms[i].species) - coordination);
    if (db == 0) continue;
    Vec3 sum = Vec3::Zero();
    for (const Neighbor& nb : adjacency[i]) sum += nb.offset.normalized();
    Vec3 dir = Vec3::UnitZ();
    if (sum.norm() > 1e-9) dir = -sum.normalized();
    report.entries.push_back({i, db, dir});
  }
  return report;
}

std::vector<Vec3> missing_bond_directions(std::span<const Vec3> bonds) {
  std::vector<Vec3> u;
  u.reserve(bonds.size());
  for (const Vec3& b : bonds) u.push_back(b.normalized());

  switch (u.size()) {
  case 0: {
    const double k = 1.0 / std::sqrt(3.0);
    return {Vec3(k, k, k), Vec3(k, -k, -k), Vec3(-k, k, -k), Vec3(-k, -k, k)};
  }
  case 1: {
    const Vec3& b = u[0];
    Vec3 ref = std::abs(b.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
    const Vec3 e1 = (ref - ref.dot(b) * b).normalized();
    const Vec3 e2 = b.cross(e1);
    const double radial = 2.0 * std::sqrt(2.0) / 3.0;
    std::vector<Vec3> out;
    for (int k = 0; k < 3; ++k) {
      const double phi = 2.0 * constants::pi * k / 3.0;
      out.push_back(-b / 3.0 + radial * (std::cos(phi) * e1 + std::sin(phi) * e2));
    }
    return out;
  }
  case 2: {
    const Vec3 half = -(u[0] + u[1]) / 2.0;
    const Vec3 c = u[0].cross(u[1]).normalized();
    const double t = std::sqrt(std::max(0.0, 1.0 - half.squaredNorm()));
    return {(half + t * c).normalized(), (half - t * c).normalized()};
  }
  case 3: {
    const Vec3 sum = u[0] + u[1] + u[2];
    if (sum.norm() < 1e-9) return {Vec3::UnitZ()};
    return {-sum.normalized()};
  }
  default:
    return {};
  }
}

// ---------------------------------------------------------------------------
// Builders

Structure build_bulk(double lattice_param, std::array<int, 3> repetitions) {
  if (!(lattice_param > 0.0)) throw InputError("lattice parameter must be positive");
  for (int r : repetitions) {
    if (r < 1) throw InputError("repetitions must be >= 1");
  }
  static constexpr std::array<std::array<double, 3>, 4> fcc{
      {{0.0, 0.0, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}}};

  Structure s;
  for (int i = 0; i < 3; ++i) {
    s.cell.vectors[i] = Vec3::Unit(i) * lattice_param * repetitions[i];
  }
  s.cell.periodic = {true, true, true};
  for (int i = 0; i < repetitions[0]; ++i) {
    for (int j = 0; j < repetitions[1]; ++j) {
      for (int k = 0; k < repetitions[2]; ++k) {
        for (const auto& f : fcc) {
          for (double shift : {0.0, 0.25}) {
            const Vec3 frac(i + f[0] + shift, j + f[1] + shift, k + f[2] + shift);
            s.atoms.push_back({"C", frac * lattice_param, Role::Bulk});
          }
        }
      }
    }
  }
  return s;
}

Structure cut_slab(double lattice_param, MillerIndex surface, int layers,
                   std::array<int, 2> lateral_repeats, double vacuum) {
  const int nonzero = (surface.h != 0) + (surface.k != 0) + (surface.l != 0);
  const int magnitude = std::abs(surface.h) + std::abs(surface.k) + std::abs(surface.l);
  if (nonzero != 1 || magnitude != 1) {
    throw UnsupportedSurfaceError("unsupported surface (" + std::to_string(surface.h) + " " +
                                  std::to_string(surface.k) + " " + std::to_string(surface.l) +
                                  "); only the (100) family is implemented");
  }
  if (!(lattice_param > 0.0)) throw InputError("lattice parameter must be positive");
  if (layers < 6) throw InputError("a slab needs at least 6 layers");
  if (!(vacuum >= 10.0)) throw InputError("vacuum gap must be at least 10 Å");
  if (lateral_repeats[0] < 1 || lateral_repeats[1] < 1) {
    throw InputError("lateral repeats must be >= 1");
  }

  // Layer L sits at depth L*a/4. Within a layer the occupied half-row indices
  // (p along x, q along y, unit a/(2 sqrt 2)) follow a period-4 parity pattern;
  // bonds alternate between the x and y directions from layer to layer.
  static constexpr std::array<std::array<int, 2>, 4> parity{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const double half_row = lattice_param / (2.0 * std::sqrt(2.0));
  const double spacing = lattice_param / 4.0;
  const int n = lateral_repeats[0];
  const int m = lateral_repeats[1];
  const double z_bottom = vacuum / 2.0;

  Structure s;
  s.cell.vectors[0] = Vec3(2 * n * half_row, 0.0, 0.0);
  s.cell.vectors[1] = Vec3(0.0, 2 * m * half_row, 0.0);
  s.cell.vectors[2] = Vec3(0.0, 0.0, (layers - 1) * spacing + vacuum);
  s.cell.periodic = {true, true, false};

  for (int layer = 0; layer < layers; ++layer) {
    const auto& par = parity[static_cast<std::size_t>(layer % 4)];
    const double z = z_bottom + (layers - 1 - layer) * spacing;
    const Role role = (layer == 0 || layer == layers - 1) ? Role::Surface : Role::Bulk;
    for (int p = par[0]; p < 2 * n; p += 2) {
      for (int q = par[1]; q < 2 * m; q += 2) {
        s.atoms.push_back({"C", Vec3(p * half_row, q * half_row, z), role});
      }
    }
  }
  return s;
}

SlabFrame slab_frame(const Structure& slab) {
  const auto& per = slab.cell.periodic;
  if (!(per[0] && per[1] && !per[2])) {
    throw InputError("expected a slab: periodic along the first two cell vectors only");
  }
  std::vector<std::size_t> carbons;
  for (std::size_t i = 0; i < slab.atoms.size(); ++i) {
    if (slab.atoms[i].species == "C") carbons.push_back(i);
  }
  if (carbons.size() < 2) throw InputError("slab contains fewer than two carbons");

  double nearest = std::numeric_limits<double>::infinity();
  const std::size_t probes = std::min<std::size_t>(carbons.size(), 8);
  for (std::size_t a = 0; a < probes; ++a) {
    const Vec3& ra = slab.atoms[carbons[a]].position;
    for (std::size_t b : carbons) {
      if (b == carbons[a]) continue;
      nearest = std::min(nearest, slab.cell.minimum_image(slab.atoms[b].position - ra).norm());
    }
  }

  SlabFrame f;
  f.lattice = nearest * 4.0 / std::sqrt(3.0);
  f.layer_spacing = f.lattice / 4.0;
  f.row_pitch = f.lattice / std::sqrt(2.0);
  f.top_z = -std::numeric_limits<double>::infinity();
  f.bottom_z = std::numeric_limits<double>::infinity();
  for (std::size_t i : carbons) {
    f.top_z = std::max(f.top_z, slab.atoms[i].position.z());
    f.bottom_z = std::min(f.bottom_z, slab.atoms[i].position.z());
  }
  return f;
}

int SlabFrame::layer_of(const Vec3& position) const {
  return static_cast<int>(std::lround((top_z - position.z()) / layer_spacing));
}

Structure carve_chadi_step(const Structure& slab, StepAxis step_axis, int upper_terrace_width) {
  if (upper_terrace_width < 0) throw InputError("terrace width must be non-negative");
  if (upper_terrace_width == 0) return slab;

  for (const Atom& a : slab.atoms) {
    if (a.species != "C") throw InputError("carve expects an unterminated slab");
  }
  const SlabFrame frame = slab_frame(slab);
  const int axis = step_axis == StepAxis::Y ? 0 : 1; // coordinate across the edge
  const int rows =
      static_cast<int>(std::lround(slab.cell.vectors[axis][axis] / frame.row_pitch));
  const int other =
      static_cast<int>(std::lround(slab.cell.vectors[1 - axis][1 - axis] / frame.row_pitch));
  constexpr int min_terrace_rows = 2;
  if (upper_terrace_width < min_terrace_rows || rows - upper_terrace_width < min_terrace_rows) {
    throw GeometryError("terrace too narrow: " + std::to_string(rows) +
                        " rows cannot host an upper terrace of " +
                        std::to_string(upper_terrace_width) + " and a lower terrace of at least " +
                        std::to_string(min_terrace_rows));
  }

  std::vector<bool> remove(slab.atoms.size(), false);
  int top_count = 0;
  for (std::size_t i = 0; i < slab.atoms.size(); ++i) {
    const Atom& a = slab.atoms[i];
    if (frame.layer_of(a.position) != 0) continue;
    ++top_count;
    int row = static_cast<int>(std::lround(a.position[axis] / frame.row_pitch));
    row = ((row % rows) + rows) % rows;
    remove[i] = row >= upper_terrace_width;
  }
  if (top_count != rows * other) {
    throw GeometryError("carve expects a flat slab with a complete top layer");
  }

  const Adjacency adj = neighbor_list(slab);
  Structure out;
  out.cell = slab.cell;
  out.bond_cutoff = slab.bond_cutoff;
  for (std::size_t i = 0; i < slab.atoms.size(); ++i) {
    if (remove[i]) continue;
    Atom a = slab.atoms[i];
    for (const Neighbor& nb : adj[i]) {
      if (remove[nb.index]) a.role = Role::Surface;
    }
    out.atoms.push_back(a);
  }
  return out;
}

std::vector<std::size_t> trench_edge_sites(const Structure& slab) {
  const SlabFrame frame = slab_frame(slab);
  const DbReport report = enumerate_dbs(slab);
  std::vector<std::size_t> out;
  for (const DbEntry& e : report.entries) {
    const Atom& a = slab.atoms[e.atom];
    if (a.species != "C" || a.role == Role::FloatingC || e.db_count != 1) continue;
    if (frame.layer_of(a.position) != 1) continue;
    const Vec3& d = *e.direction;
    if (d.z() > 0.1 && std::hypot(d.x(), d.y()) > 0.1) out.push_back(e.atom);
  }
  return out;
}

Structure raise_trench_carbon(const Structure& slab, std::size_t site) {
  if (site >= slab.atoms.size()) {
    throw InvalidSiteError("site " + std::to_string(site) + " is out of range");
  }
  const auto edges = trench_edge_sites(slab);
  if (std::find(edges.begin(), edges.end(), site) == edges.end()) {
    throw InvalidSiteError("site " + std::to_string(site) +
                           " is not a trench-edge carbon on a (111) microfacet");
  }
  const SlabFrame frame = slab_frame(slab);
  const Adjacency adj = neighbor_list(slab);

  // Mirror the carbon through the plane of three of its tetrahedral partners
  // (the twin position of the (111) stacking). It keeps the partners on that
  // plane and drops the bond to the fourth, which lies in the third layer.
  std::string last_reason = "no back bond into the third layer";
  for (const Neighbor& back : adj[site]) {
    if (back.offset.z() >= 0.0) continue;
    const std::size_t host = back.index;
    if (frame.layer_of(slab.atoms[host].position) != 2) continue;

    Structure out = slab;
    Atom& moved = out.atoms[site];
    moved.position = out.cell.wrap(moved.position - (2.0 / 3.0) * back.offset);
    try {
      validate(out);
    } catch (const GeometryError& e) {
      last_reason = e.what();
      continue;
    }
    const DbReport report = enumerate_dbs(out);
    const DbEntry* floating = report.find(site);
    const DbEntry* host_entry = report.find(host);
    if (floating == nullptr || floating->db_count != 1 || floating->direction->z() <= 0.0) {
      last_reason = "raised carbon does not end with a single vacuum-facing bond";
      continue;
    }
    if (host_entry == nullptr || host_entry->db_count != 1) {
      last_reason = "third-layer partner does not end singly undercoordinated";
      continue;
    }
    moved.role = Role::FloatingC;
    out.atoms[host].role = Role::DbHost;
    return out;
  }
  throw GeometryError("cannot raise carbon " + std::to_string(site) + ": " + last_reason);
}

double spin_areal_density(const Structure& s, int n_spins) {
  if (n_spins < 0) throw InputError("spin count must be non-negative");
  const double area = s.cell.in_plane_area();
  if (!(area > 0.0)) throw InputError("in-plane cell area is zero");
  return n_spins / (area * constants::angstrom2_to_cm2);
}

} // namespace surfspin::crystal
