#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "surfspin/crystal.hpp"
#include "surfspin/error.hpp"

using namespace surfspin;
using namespace surfspin::crystal;
using support::a0;

namespace {

// Diamond sites from the cubic description (FCC + (1/4,1/4,1/4) basis),
// viewed from a (001) surface: x' along [1-10], y' along [110], depth along
// -z. Returns positions relative to a top-layer site, folded into the cell.
std::vector<Vec3> enumerate_slab_sites(double a, int layers, int n, int m) {
  const double lx = n * a / std::sqrt(2.0);
  const double ly = m * a / std::sqrt(2.0);
  const int reach = 2 * (n + m + layers);
  std::vector<Vec3> out;
  for (int i = -reach; i <= reach; ++i) {
    for (int j = -reach; j <= reach; ++j) {
      for (int k = -reach; k <= reach; ++k) {
        // Quarter-lattice units; diamond sites have all-even or all-odd
        // coordinates with the FCC parity rule.
        const bool even = i % 2 == 0 && j % 2 == 0 && k % 2 == 0;
        const bool odd = i % 2 != 0 && j % 2 != 0 && k % 2 != 0;
        if (!even && !odd) continue;
        const int base = even ? (i + j + k) : (i + j + k - 3);
        if (((base % 4) + 4) % 4 != 0) continue;
        const double X = i * a / 4, Y = j * a / 4, Z = k * a / 4;
        const double depth = -Z;
        if (depth < -1e-9 || depth > (layers - 1) * a / 4 + 1e-9) continue;
        double xp = (X - Y) / std::sqrt(2.0);
        double yp = (X + Y) / std::sqrt(2.0);
        xp -= std::floor(xp / lx + 1e-9) * lx;
        yp -= std::floor(yp / ly + 1e-9) * ly;
        const Vec3 p(xp, yp, -depth);
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const Vec3& q) { return (q - p).norm() < 1e-6; });
        if (!seen) out.push_back(p);
      }
    }
  }
  return out;
}

double angle_deg(const Vec3& u, const Vec3& v) {
  return std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0)) * 180.0 /
         constants::pi;
}

Structure flat(int n = 6, int layers = 9) { return cut_slab(a0, {1, 0, 0}, layers, {n, n}, 10.0); }

} // namespace

TEST_SUITE("crystal") {

TEST_CASE("bulk cell: counts, bond lengths and angles") {
  const Structure one = build_bulk(a0, {1, 1, 1});
  CHECK(one.atoms.size() == 8);
  CHECK(build_bulk(a0, {2, 2, 2}).atoms.size() == 64);

  const Adjacency adj = neighbor_list(one);
  const double bond = a0 * std::sqrt(3.0) / 4.0;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    REQUIRE(adj[i].size() == 4);
    for (const auto& nb : adj[i]) CHECK(std::abs(nb.offset.norm() - bond) < 1e-10);
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t y = x + 1; y < 4; ++y) {
        CHECK(std::abs(angle_deg(adj[i][x].offset, adj[i][y].offset) - 109.47122063449069) <
              1e-8);
      }
    }
  }
  CHECK(bond == doctest::Approx(1.5459).epsilon(1e-4));
  const Structure exp_cell = build_bulk(3.567, {1, 1, 1});
  CHECK(neighbor_list(exp_cell)[0][0].offset.norm() == doctest::Approx(1.5446).epsilon(1e-4));
}

TEST_CASE("bulk rejects non-positive input") {
  CHECK_THROWS_AS(build_bulk(0.0, {1, 1, 1}), InputError);
  CHECK_THROWS_AS(build_bulk(a0, {1, 0, 1}), InputError);
}

TEST_CASE("neighbour list distances") {
  Structure s;
  s.cell.vectors = {Vec3(20, 0, 0), Vec3(0, 20, 0), Vec3(0, 0, 20)};
  s.atoms = {{"C", Vec3(5, 5, 5), Role::Bulk}, {"C", Vec3(6.545, 5, 5), Role::Bulk}};
  CHECK(neighbor_list(s)[0].size() == 1);
  s.atoms[1].position = Vec3(5 + a0 / std::sqrt(2.0), 5, 5);
  CHECK(neighbor_list(s)[0].empty());
}

TEST_CASE("neighbour list honours periodic images and is symmetric") {
  Structure s;
  s.cell.vectors = {Vec3(10, 0, 0), Vec3(0, 10, 0), Vec3(0, 0, 10)};
  s.cell.periodic = {true, true, false};
  s.atoms = {{"C", Vec3(0.2, 5, 5), Role::Bulk}, {"C", Vec3(9.0, 5, 5), Role::Bulk}};
  const Adjacency adj = neighbor_list(s);
  REQUIRE(adj[0].size() == 1);
  CHECK(adj[0][0].offset.x() == doctest::Approx(-1.2));
  REQUIRE(adj[1].size() == 1);
  CHECK(adj[1][0].offset.x() == doctest::Approx(1.2));
  s.atoms[1].position = Vec3(0.2, 5, 8.9); // across the aperiodic axis
  s.atoms[0].position = Vec3(0.2, 5, 0.2);
  CHECK(neighbor_list(s)[0].empty());
}

TEST_CASE("slab geometry matches a brute-force lattice enumeration") {
  for (auto [n, m, layers] : {std::tuple{1, 1, 8}, {2, 1, 8}, {2, 2, 6}, {3, 2, 9}}) {
    CAPTURE(n);
    CAPTURE(m);
    CAPTURE(layers);
    const Structure s = cut_slab(a0, {1, 0, 0}, layers, {n, m}, 10.0);
    const std::vector<Vec3> oracle = enumerate_slab_sites(a0, layers, n, m);
    REQUIRE(s.atoms.size() == oracle.size());
    const double top = s.atoms.front().position.z();
    for (const Atom& atom : s.atoms) {
      const Vec3 rel(atom.position.x(), atom.position.y(), atom.position.z() - top);
      const bool found = std::any_of(oracle.begin(), oracle.end(), [&](const Vec3& q) {
        return s.cell.minimum_image(q - rel).norm() < 1e-6;
      });
      CHECK(found);
    }
  }
  // (2x1) column, 8 layers: one site per layer per (1x1) cell.
  CHECK(cut_slab(a0, {1, 0, 0}, 8, {2, 1}, 10.0).atoms.size() == 16);
}

TEST_CASE("slab cell and surface coordination") {
  const Structure s = cut_slab(a0, {1, 0, 0}, 8, {6, 6}, 10.0);
  CHECK(s.cell.vectors[0].norm() == doctest::Approx(15.146).epsilon(1e-4));
  CHECK(s.cell.vectors[1].norm() == doctest::Approx(15.146).epsilon(1e-4));
  CHECK(s.cell.periodic == std::array<bool, 3>{true, true, false});

  const Structure one = cut_slab(a0, {1, 0, 0}, 8, {1, 1}, 10.0);
  CHECK(one.cell.vectors[0].norm() == doctest::Approx(a0 / std::sqrt(2.0)));
  const SlabFrame f = slab_frame(one);
  const DbReport r = enumerate_dbs(one);
  for (std::size_t i = 0; i < one.atoms.size(); ++i) {
    const int layer = f.layer_of(one.atoms[i].position);
    const DbEntry* e = r.find(i);
    if (layer == 0 || layer == 7) {
      REQUIRE(e != nullptr);
      CHECK(e->db_count == 2);
      CHECK(e->direction->z() * (layer == 0 ? 1 : -1) > 0.0);
    } else {
      CHECK(e == nullptr);
    }
  }
}

TEST_CASE("slab preconditions") {
  CHECK_THROWS_AS(cut_slab(a0, {1, 1, 1}, 8, {1, 1}, 10.0), UnsupportedSurfaceError);
  CHECK_THROWS_AS(cut_slab(a0, {1, 1, 0}, 8, {1, 1}, 10.0), UnsupportedSurfaceError);
  CHECK_THROWS_AS(cut_slab(a0, {1, 0, 0}, 5, {1, 1}, 10.0), InputError);
  CHECK_THROWS_AS(cut_slab(a0, {1, 0, 0}, 8, {1, 1}, 9.9), InputError);
  CHECK_NOTHROW(cut_slab(a0, {0, 0, 1}, 8, {1, 1}, 10.0));
}

TEST_CASE("flat slab: every top-layer atom has two dangling bonds") {
  const Structure s = flat();
  const SlabFrame f = slab_frame(s);
  const DbReport r = enumerate_dbs(s);
  int top = 0;
  for (const DbEntry& e : r.entries) {
    if (f.layer_of(s.atoms[e.atom].position) == 0) {
      ++top;
      CHECK(e.db_count == 2);
    }
  }
  CHECK(top == 36);
  CHECK(r.total() == 144);
}

TEST_CASE("dangling-bond direction of a singly undercoordinated atom") {
  Structure s;
  s.cell.vectors = {Vec3(30, 0, 0), Vec3(0, 30, 0), Vec3(0, 0, 30)};
  const Vec3 c(15, 15, 15);
  s.atoms.push_back({"C", c, Role::Bulk});
  const double k = a0 / 4.0;
  const Vec3 bonds[] = {Vec3(k, k, k), Vec3(k, -k, -k), Vec3(-k, k, -k)};
  for (const Vec3& b : bonds) s.atoms.push_back({"H", c + b * (1.09 / b.norm()), Role::TerminatorH});
  const DbReport r = enumerate_dbs(s);
  const DbEntry* e = r.find(0);
  REQUIRE(e != nullptr);
  CHECK(e->db_count == 1);
  const Vec3 expect = -(bonds[0].normalized() + bonds[1].normalized() + bonds[2].normalized()).normalized();
  CHECK((*e->direction - expect).norm() < 1e-12);
  CHECK((*e->direction - Vec3(-1, -1, 1).normalized()).norm() < 1e-12);
}

TEST_CASE("missing bond directions complete a tetrahedron") {
  const double k = 1.0 / std::sqrt(3.0);
  const std::vector<Vec3> tet{Vec3(k, k, k), Vec3(k, -k, -k), Vec3(-k, k, -k), Vec3(-k, -k, k)};
  for (std::size_t present = 1; present <= 3; ++present) {
    const std::vector<Vec3> bonds(tet.begin(), tet.begin() + static_cast<long>(present));
    const auto missing = missing_bond_directions(bonds);
    REQUIRE(missing.size() == 4 - present);
    for (std::size_t j = present; j < 4; ++j) {
      const bool found = std::any_of(missing.begin(), missing.end(),
                                     [&](const Vec3& m) { return (m - tet[j]).norm() < 1e-9; });
      if (present >= 2) CHECK(found);
    }
    // One bond leaves a free azimuth: only the tetrahedral angles are fixed.
    for (const Vec3& m : missing) {
      for (const Vec3& b : bonds) CHECK(angle_deg(m, b) == doctest::Approx(109.4712206));
    }
  }
  CHECK(missing_bond_directions({}).size() == 4);
}

TEST_CASE("carved step: identity, facet sites, parity") {
  const Structure s = flat();
  CHECK(carve_chadi_step(s, StepAxis::Y, 0) == s);

  const Structure step = carve_chadi_step(s, StepAxis::Y, 3);
  CHECK(step.atoms.size() == s.atoms.size() - 18);
  const int before = support::count_db(s);
  const int after = support::count_db(step);
  CHECK((after - before) % 2 == 0);
  CHECK(after % 2 == 0);

  const auto facet = trench_edge_sites(step);
  CHECK(facet.size() == 12);
  const SlabFrame f = slab_frame(step);
  const DbReport r = enumerate_dbs(step);
  for (std::size_t i : facet) {
    const DbEntry* e = r.find(i);
    REQUIRE(e != nullptr);
    CHECK(e->db_count == 1);
    CHECK(f.layer_of(step.atoms[i].position) == 1);
    CHECK(e->direction->z() > 0.1);
    CHECK(std::abs(e->direction->x()) > 0.1); // tilted across the edge
  }
  // A flat slab has no facet.
  CHECK(trench_edge_sites(s).empty());
}

TEST_CASE("carve preconditions") {
  const Structure s = flat();
  CHECK_THROWS_AS(carve_chadi_step(s, StepAxis::Y, 1), GeometryError);
  CHECK_THROWS_AS(carve_chadi_step(s, StepAxis::Y, 5), GeometryError);
  CHECK_THROWS_AS(carve_chadi_step(flat(3), StepAxis::Y, 2), GeometryError);
  const Structure step = carve_chadi_step(s, StepAxis::Y, 3);
  CHECK_THROWS_AS(carve_chadi_step(step, StepAxis::Y, 3), GeometryError);
  // An X-running edge keeps every exposed bond in the (100) family.
  CHECK(trench_edge_sites(carve_chadi_step(s, StepAxis::X, 3)).empty());
}

TEST_CASE("raising a trench carbon leaves two single dangling bonds") {
  const Structure step = carve_chadi_step(flat(), StepAxis::Y, 3);
  const auto facet = trench_edge_sites(step);
  for (std::size_t site : facet) {
    CAPTURE(site);
    const Structure raised = raise_trench_carbon(step, site);
    const DbReport r = enumerate_dbs(raised);
    const DbEntry* fl = r.find(site);
    REQUIRE(fl != nullptr);
    CHECK(fl->db_count == 1);
    CHECK(fl->direction->z() > 0.0);
    CHECK(raised.atoms[site].role == Role::FloatingC);

    const auto host = std::find_if(raised.atoms.begin(), raised.atoms.end(),
                                   [](const Atom& a) { return a.role == Role::DbHost; });
    REQUIRE(host != raised.atoms.end());
    const std::size_t h = static_cast<std::size_t>(host - raised.atoms.begin());
    REQUIRE(r.find(h) != nullptr);
    CHECK(r.find(h)->db_count == 1);
    // Third carbon layer below the local (100) surface.
    CHECK(slab_frame(raised).layer_of(raised.atoms[h].position) == 2);
    CHECK_NOTHROW(validate(raised));
    // Only the moved carbon changed position.
    for (std::size_t i = 0; i < step.atoms.size(); ++i) {
      if (i != site) CHECK(raised.atoms[i].position == step.atoms[i].position);
    }
    // The raised carbon keeps three carbon partners.
    CHECK(neighbor_list(raised)[site].size() == 3);
  }
}

TEST_CASE("raise rejects non-facet sites") {
  const Structure step = carve_chadi_step(flat(), StepAxis::Y, 3);
  const SlabFrame f = slab_frame(step);
  std::size_t interior = 0;
  while (f.layer_of(step.atoms[interior].position) != 4) ++interior;
  CHECK_THROWS_AS(raise_trench_carbon(step, interior), InvalidSiteError);
  CHECK_THROWS_AS(raise_trench_carbon(step, step.atoms.size()), InvalidSiteError);
  CHECK_THROWS_AS(raise_trench_carbon(flat(), 0), InvalidSiteError);
}

TEST_CASE("single-site edits change the dangling-bond total by an even number") {
  const Structure base = flat();
  const int total = support::count_db(base);
  const SlabFrame f = slab_frame(base);
  auto g = support::rng(1);
  const double s = a0 / (2.0 * std::sqrt(2.0));
  for (int trial = 0; trial < 20; ++trial) {
    Structure edited = base;
    if (trial % 2 == 0) {
      std::uniform_int_distribution<std::size_t> pick(0, base.atoms.size() - 1);
      edited.atoms.erase(edited.atoms.begin() + static_cast<long>(pick(g)));
    } else {
      // Adlayer site: next layer above the top follows the period-4 pattern
      // (p even, q odd).
      std::uniform_int_distribution<int> pq(0, 5);
      const Vec3 p(2 * pq(g) * s, (2 * pq(g) + 1) * s, f.top_z + a0 / 4.0);
      edited.atoms.push_back({"C", p, Role::Surface});
    }
    const int delta = support::count_db(edited) - total;
    CAPTURE(trial);
    CHECK(delta % 2 == 0);
  }
}

TEST_CASE("neighbour lists are invariant under translation and wrapping") {
  const Structure step = raise_trench_carbon(
      carve_chadi_step(flat(), StepAxis::Y, 3),
      trench_edge_sites(carve_chadi_step(flat(), StepAxis::Y, 3)).front());
  const auto reference = support::edge_set(neighbor_list(step));
  auto g = support::rng(2);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 5; ++trial) {
    Structure moved = step;
    const Vec3 shift(u(g), u(g), 0.1 * u(g));
    for (Atom& a : moved.atoms) a.position = moved.cell.wrap(a.position + shift);
    CHECK(support::edge_set(neighbor_list(moved)) == reference);
  }
}

TEST_CASE("validation catches overlap and over-coordination") {
  Structure s = build_bulk(a0, {1, 1, 1});
  CHECK_NOTHROW(validate(s));
  s.atoms.push_back({"H", s.atoms[0].position + Vec3(0.5, 0, 0), Role::TerminatorH});
  CHECK_THROWS_AS(validate(s), GeometryError);
  // A carbon in the empty tetrahedral site next to atom 0 gives it a fifth partner.
  s.atoms.back().species = "C";
  s.atoms.back().position = s.atoms[0].position - Vec3(a0 / 4, a0 / 4, a0 / 4) * 1.0001;
  CHECK_THROWS_AS(validate(s), GeometryError);
}

TEST_CASE("spin areal density") {
  const Structure s = flat();
  CHECK(spin_areal_density(s, 1) == doctest::Approx(4.36e13).epsilon(2e-3));
  CHECK(spin_areal_density(s, 0) == 0.0);
  Structure box;
  box.cell.vectors = {Vec3(10, 0, 0), Vec3(0, 10, 0), Vec3(0, 0, 30)};
  box.cell.periodic = {true, true, false};
  CHECK(spin_areal_density(box, 1) == doctest::Approx(1.0e14));
  CHECK_THROWS_AS(spin_areal_density(box, -1), InputError);
  box.cell.vectors[1] = Vec3(10, 0, 0);
  CHECK_THROWS_AS(spin_areal_density(box, 1), InputError);
}

} // TEST_SUITE
