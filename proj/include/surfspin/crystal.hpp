#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "surfspin/constants.hpp"

namespace surfspin {

using Vec3 = Eigen::Vector3d;

} // namespace surfspin

namespace surfspin::crystal {

enum class Role {
  Bulk,
  Surface,
  TerminatorH,
  TerminatorOBridge,
  TerminatorOH,
  FloatingC,
  DbHost,
};

std::string_view role_name(Role role);
std::optional<Role> parse_role(std::string_view name);

/// Three lattice vectors (Å) plus per-axis periodicity. A slab is aperiodic
/// along its surface normal; the vacuum gap lives in that vector.
struct Cell {
  std::array<Vec3, 3> vectors{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  std::array<bool, 3> periodic{true, true, true};

  double volume() const;
  Eigen::Matrix3d matrix() const;
  Vec3 to_fractional(const Vec3& r) const;
  Vec3 wrap(const Vec3& r) const;
  Vec3 minimum_image(const Vec3& d) const;
  /// Area spanned by the two periodic in-plane vectors (vectors 0 and 1 when
  /// the cell is not a slab).
  double in_plane_area() const;
  /// Throws GeometryError on a singular or left-handed cell.
  void validate() const;

  bool operator==(const Cell& other) const;
};

struct Atom {
  std::string species;
  Vec3 position = Vec3::Zero();
  Role role = Role::Bulk;

  bool operator==(const Atom& other) const;
};

struct Structure {
  Cell cell;
  std::vector<Atom> atoms;
  double bond_cutoff = constants::default_bond_cutoff_A;

  bool operator==(const Structure& other) const;
  std::size_t count(std::string_view species) const;
};

/// Valence used for dangling-bond bookkeeping: C 4, O 2, H 1.
int valence(std::string_view species);

/// Bond cutoff for a species pair. `bond_cutoff` applies to C-C; pairs with a
/// terminator use 1.1 times their nominal bond length (C-H 1.09, C-O 1.43,
/// O-H 0.97 Å). H-H and O-O never bond.
double pair_cutoff(const Structure& s, std::string_view a, std::string_view b);

/// Throws GeometryError when two atoms are closer than 0.7 Å or a carbon has
/// more than four neighbours.
void validate(const Structure& s);

struct Neighbor {
  std::size_t index;
  Vec3 offset; ///< vector from the atom to this neighbour's periodic image

  bool operator==(const Neighbor&) const = default;
};

using Adjacency = std::vector<std::vector<Neighbor>>;

/// Symmetric adjacency honouring periodic images. Neighbours of each atom are
/// ordered by index, then by image.
Adjacency neighbor_list(const Structure& s);

struct DbEntry {
  std::size_t atom;
  int db_count;
  std::optional<Vec3> direction;
};

/// Undercoordinated atoms only, in atom order.
struct DbReport {
  std::vector<DbEntry> entries;

  int total() const;
  const DbEntry* find(std::size_t atom) const;
};

DbReport enumerate_dbs(const Structure& s);
DbReport enumerate_dbs(const Structure& s, const Adjacency& adjacency);

/// Ideal sp3 directions left free by the given bond vectors. Exact for
/// tetrahedral input; with three bonds the result is the negated normalised sum.
std::vector<Vec3> missing_bond_directions(std::span<const Vec3> bonds);

Structure build_bulk(double lattice_param, std::array<int, 3> repetitions);

struct MillerIndex {
  int h = 1;
  int k = 0;
  int l = 0;
};

/// Unterminated diamond slab. x runs along the top-layer back-bond direction,
/// y along the dimer-row direction and z along the outward surface normal.
Structure cut_slab(double lattice_param, MillerIndex surface, int layers,
                   std::array<int, 2> lateral_repeats, double vacuum);

/// Direction the step edge runs along. Only a Y-running edge exposes the
/// tilted (111) microfacet.
enum class StepAxis { X, Y };

Structure carve_chadi_step(const Structure& slab, StepAxis step_axis, int upper_terrace_width);

/// Second-layer carbons at a step edge whose single dangling bond tilts out of
/// the (100) plane, i.e. the exposed (111)-facet sites.
std::vector<std::size_t> trench_edge_sites(const Structure& slab);

Structure raise_trench_carbon(const Structure& slab, std::size_t site);

/// Layer bookkeeping recovered from a (100) slab's geometry.
struct SlabFrame {
  double lattice = 0.0;
  double layer_spacing = 0.0;
  double row_pitch = 0.0;
  double top_z = 0.0;
  double bottom_z = 0.0;

  /// 0 for the topmost carbon layer.
  int layer_of(const Vec3& position) const;
};

SlabFrame slab_frame(const Structure& slab);

/// n_spins per in-plane cell area, in cm^-2.
double spin_areal_density(const Structure& s, int n_spins);

} // namespace surfspin::crystal
