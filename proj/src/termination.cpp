#include "surfspin/termination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Geometry>

#include "surfspin/error.hpp"

namespace surfspin::crystal {

namespace {

// Vacant sites sit at least 2.52 Å apart; a distorted bond near the raised
// carbon still aims within this distance of its site.
constexpr double shared_target_tol = 1.0;

struct ExposedSite {
  std::size_t atom;
  SiteClass cls;
  std::vector<Vec3> dirs;
};

std::vector<Vec3> free_directions(const Adjacency& adj, std::size_t i) {
  std::vector<Vec3> bonds;
  for (const Neighbor& nb : adj[i]) bonds.push_back(nb.offset);
  return missing_bond_directions(bonds);
}

/// Indices (into a.dirs, b.dirs) of free directions of two carbons that aim at
/// the same vacant lattice site.
std::optional<std::pair<std::size_t, std::size_t>>
shared_target(const Structure& s, double cc, const Vec3& pa, const std::vector<Vec3>& da,
              const Vec3& pb, const std::vector<Vec3>& db) {
  for (std::size_t x = 0; x < da.size(); ++x) {
    for (std::size_t y = 0; y < db.size(); ++y) {
      const Vec3 ta = pa + cc * da[x];
      const Vec3 tb = pb + cc * db[y];
      if (s.cell.minimum_image(ta - tb).norm() < shared_target_tol) return std::pair{x, y};
    }
  }
  return std::nullopt;
}

struct Classified {
  std::vector<ExposedSite> sites; // atom order
  double cc = 0.0;
};

Classified classify(const Structure& slab, const Adjacency& adj) {
  const SlabFrame frame = slab_frame(slab);
  const int bottom_layer =
      frame.layer_of(Vec3(0.0, 0.0, frame.bottom_z));
  const DbReport dbs = enumerate_dbs(slab, adj);

  Classified out;
  out.cc = frame.lattice * std::sqrt(3.0) / 4.0;
  std::optional<std::size_t> floating;
  for (const DbEntry& e : dbs.entries) {
    const Atom& a = slab.atoms[e.atom];
    if (a.species != "C") continue;
    SiteClass cls = SiteClass::Trench;
    const int layer = frame.layer_of(a.position);
    if (a.role == Role::FloatingC) {
      cls = SiteClass::Floating;
      floating = e.atom;
    } else if (a.role == Role::DbHost) {
      cls = SiteClass::DbHost;
    } else if (layer == 0) {
      cls = SiteClass::Terrace;
    } else if (layer == bottom_layer) {
      cls = SiteClass::Bottom;
    }
    out.sites.push_back({e.atom, cls, free_directions(adj, e.atom)});
  }
  if (!floating) return out;

  const Vec3 pf = slab.atoms[*floating].position;
  auto distance_to_floating = [&](const ExposedSite& site) {
    return slab.cell.minimum_image(slab.atoms[site.atom].position - pf).norm();
  };
  auto site_of = [&](std::size_t atom) -> ExposedSite* {
    for (ExposedSite& site : out.sites) {
      if (site.atom == atom) return &site;
    }
    return nullptr;
  };

  // Step bridge: the upper-terrace carbon holding the floating carbon, plus the
  // terrace neighbour sharing a vacant site with it that lies closest to C(*).
  ExposedSite* anchor = nullptr;
  for (const Neighbor& nb : adj[*floating]) {
    ExposedSite* site = site_of(nb.index);
    if (site != nullptr && site->cls == SiteClass::Terrace) {
      anchor = site;
      break;
    }
  }
  if (anchor != nullptr) {
    ExposedSite* partner = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (ExposedSite& site : out.sites) {
      if (&site == anchor || site.cls != SiteClass::Terrace) continue;
      if (!shared_target(slab, out.cc, slab.atoms[anchor->atom].position, anchor->dirs,
                         slab.atoms[site.atom].position, site.dirs)) {
        continue;
      }
      const double d = distance_to_floating(site);
      if (d < best) {
        best = d;
        partner = &site;
      }
    }
    anchor->cls = SiteClass::StepBridge;
    if (partner != nullptr) partner->cls = SiteClass::StepBridge;
  }

  std::vector<ExposedSite*> trench;
  for (ExposedSite& site : out.sites) {
    if (site.cls == SiteClass::Trench) trench.push_back(&site);
  }
  std::stable_sort(trench.begin(), trench.end(), [&](ExposedSite* l, ExposedSite* r) {
    return distance_to_floating(*l) < distance_to_floating(*r);
  });
  for (std::size_t k = 0; k < std::min<std::size_t>(2, trench.size()); ++k) {
    trench[k]->cls = SiteClass::TrenchAdjacent;
  }
  return out;
}

struct Bridge {
  std::size_t first, second; // indices into sites, first < second
  std::size_t dir_first, dir_second;
};

} // namespace

std::string_view terminator_name(Terminator t) {
  switch (t) {
  case Terminator::H: return "H";
  case Terminator::OBridge: return "O-bridge";
  case Terminator::OH: return "OH";
  case Terminator::None: return "none";
  }
  return "none";
}

std::optional<Terminator> parse_terminator(std::string_view name) {
  for (Terminator t : {Terminator::H, Terminator::OBridge, Terminator::OH, Terminator::None}) {
    if (terminator_name(t) == name) return t;
  }
  return std::nullopt;
}

std::string_view site_class_name(SiteClass c) {
  switch (c) {
  case SiteClass::Bottom: return "bottom";
  case SiteClass::Terrace: return "terrace";
  case SiteClass::Trench: return "trench";
  case SiteClass::StepBridge: return "step-bridge";
  case SiteClass::TrenchAdjacent: return "trench-adjacent";
  case SiteClass::Floating: return "floating";
  case SiteClass::DbHost: return "db-host";
  }
  return "trench";
}

std::optional<SiteClass> parse_site_class(std::string_view name) {
  for (SiteClass c : {SiteClass::Bottom, SiteClass::Terrace, SiteClass::Trench,
                      SiteClass::StepBridge, SiteClass::TrenchAdjacent, SiteClass::Floating,
                      SiteClass::DbHost}) {
    if (site_class_name(c) == name) return c;
  }
  return std::nullopt;
}

TerminationRules full_passivation() {
  TerminationRules rules;
  for (SiteClass c : {SiteClass::Bottom, SiteClass::Terrace, SiteClass::Trench,
                      SiteClass::StepBridge, SiteClass::TrenchAdjacent, SiteClass::Floating,
                      SiteClass::DbHost}) {
    rules[c] = Terminator::H;
  }
  return rules;
}

std::map<std::size_t, SiteClass> classify_exposed_sites(const Structure& slab) {
  const Classified c = classify(slab, neighbor_list(slab));
  std::map<std::size_t, SiteClass> out;
  for (const ExposedSite& site : c.sites) out[site.atom] = site.cls;
  return out;
}

Structure terminate(const Structure& slab, const TerminationRules& rules) {
  const Adjacency adj = neighbor_list(slab);
  const Classified classified = classify(slab, adj);
  const auto& sites = classified.sites;

  std::set<SiteClass> missing;
  std::vector<Terminator> rule(sites.size());
  for (std::size_t k = 0; k < sites.size(); ++k) {
    auto it = rules.find(sites[k].cls);
    if (it == rules.end()) {
      missing.insert(sites[k].cls);
    } else {
      rule[k] = it->second;
    }
  }
  if (!missing.empty()) {
    std::string names;
    for (SiteClass c : missing) {
      if (!names.empty()) names += ", ";
      names += site_class_name(c);
    }
    throw IncompleteTerminationError("no termination rule for exposed site class(es): " + names);
  }

  // Pair bridge candidates greedily in atom order within each class.
  std::vector<std::optional<std::size_t>> bridge_of(sites.size());
  std::vector<Bridge> bridges;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (rule[i] != Terminator::OBridge || bridge_of[i]) continue;
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (rule[j] != Terminator::OBridge || bridge_of[j] || sites[j].cls != sites[i].cls) {
        continue;
      }
      const auto hit = shared_target(slab, classified.cc, slab.atoms[sites[i].atom].position,
                                     sites[i].dirs, slab.atoms[sites[j].atom].position,
                                     sites[j].dirs);
      if (!hit) continue;
      bridge_of[i] = bridge_of[j] = bridges.size();
      bridges.push_back({i, j, hit->first, hit->second});
      break;
    }
  }

  // Nominal cap positions of every free direction; OH picks the direction whose
  // oxygen keeps farthest from the lattice and from these.
  std::vector<std::pair<std::size_t, Vec3>> nominal_caps;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    for (const Vec3& d : sites[k].dirs) {
      nominal_caps.emplace_back(k, slab.atoms[sites[k].atom].position + constants::bond_CH_A * d);
    }
  }
  auto clearance = [&](std::size_t k, const Vec3& p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < slab.atoms.size(); ++i) {
      if (i == sites[k].atom) continue;
      best = std::min(best, slab.cell.minimum_image(slab.atoms[i].position - p).norm());
    }
    for (const auto& [owner, cap] : nominal_caps) {
      if (owner == k) continue;
      best = std::min(best, slab.cell.minimum_image(cap - p).norm());
    }
    return best;
  };

  Structure out = slab;
  auto add = [&](std::string species, const Vec3& p, Role role) {
    out.atoms.push_back({std::move(species), out.cell.wrap(p), role});
  };

  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Vec3 host = slab.atoms[sites[k].atom].position;
    const auto& dirs = sites[k].dirs;
    std::vector<bool> capped(dirs.size(), false);

    switch (rule[k]) {
    case Terminator::None:
      continue;
    case Terminator::OBridge:
      if (bridge_of[k]) {
        const Bridge& br = bridges[*bridge_of[k]];
        const bool is_first = br.first == k;
        capped[is_first ? br.dir_first : br.dir_second] = true;
        if (is_first) {
          const Vec3 other =
              host + slab.cell.minimum_image(slab.atoms[sites[br.second].atom].position - host);
          const Vec3 mid = (host + other) / 2.0;
          const Vec3 target = host + classified.cc * dirs[br.dir_first];
          const Vec3 axis = (other - host).normalized();
          Vec3 up = target - mid;
          up -= up.dot(axis) * axis;
          up = up.norm() > 1e-9 ? up.normalized() : Vec3::UnitZ();
          const double half = (other - host).norm() / 2.0;
          if (half >= constants::bond_CO_A) {
            throw GeometryError("bridge partners " + std::to_string(sites[k].atom) + " and " +
                                std::to_string(sites[br.second].atom) + " are too far apart");
          }
          const double rise = std::sqrt(constants::bond_CO_A * constants::bond_CO_A - half * half);
          add("O", mid + rise * up, Role::TerminatorOBridge);
        }
      }
      break;
    case Terminator::OH: {
      std::size_t pick = 0;
      double best = -1.0;
      for (std::size_t x = 0; x < dirs.size(); ++x) {
        const double c = clearance(k, host + constants::bond_CO_A * dirs[x]);
        if (c > best + 1e-9) {
          best = c;
          pick = x;
        }
      }
      capped[pick] = true;
      const Vec3& m = dirs[pick];
      const Vec3 o = host + constants::bond_CO_A * m;
      const Vec3 ref = std::abs(m.z()) < 0.99 ? Vec3::UnitZ() : Vec3::UnitX();
      const Vec3 perp = (ref - ref.dot(m) * m).normalized();
      const Vec3 side = m.cross(perp);
      // C-O-H angle equal to the tetrahedral angle. The hydrogen starts tilted
      // upward and turns about the C-O axis to the azimuth with most room.
      const double tilt = constants::pi - std::acos(-1.0 / 3.0);
      auto h_at = [&](double phi) -> Vec3 {
        const Vec3 across = std::cos(phi) * perp + std::sin(phi) * side;
        return o + constants::bond_OH_A * (std::cos(tilt) * m + std::sin(tilt) * across);
      };
      auto room = [&](const Vec3& h) {
        double best = clearance(k, h);
        for (std::size_t i = slab.atoms.size(); i < out.atoms.size(); ++i) {
          best = std::min(best, out.cell.minimum_image(out.atoms[i].position - h).norm());
        }
        return best;
      };
      Vec3 h = h_at(0.0);
      double h_room = room(h);
      for (int step = 1; step < 12; ++step) {
        const Vec3 candidate = h_at(step * constants::pi / 6.0);
        const double r = room(candidate);
        if (r > h_room + 1e-9) {
          h = candidate;
          h_room = r;
        }
      }
      add("O", o, Role::TerminatorOH);
      add("H", h, Role::TerminatorOH);
      break;
    }
    case Terminator::H:
      break;
    }
    for (std::size_t x = 0; x < dirs.size(); ++x) {
      if (!capped[x]) add("H", host + constants::bond_CH_A * dirs[x], Role::TerminatorH);
    }
  }

  validate(out);
  return out;
}

} // namespace surfspin::crystal
