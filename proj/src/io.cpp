#include "surfspin/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "surfspin/error.hpp"

namespace surfspin::io {

namespace {

#include "step_fixture.inc"

int line_of(const YAML::Node& node) { return node.Mark().line + 1; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  throw ParseError(node.IsDefined() ? line_of(node) : 1, field, what);
}

YAML::Node load_document(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.mark.line + 1, "document", e.msg);
  }
}

void check_keys(const YAML::Node& map, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!map.IsMap()) fail(map, where, "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.Scalar();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      fail(kv.first, key, "unknown key in " + where);
    }
  }
}

YAML::Node require(const YAML::Node& map, const char* key, const YAML::Node& parent) {
  YAML::Node child = map[key];
  if (!child.IsDefined() || child.IsNull()) fail(parent, key, "missing");
  return child;
}

double as_double(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a number");
  const auto v = parse_double(node.Scalar());
  if (!v || !std::isfinite(*v)) fail(node, field, "'" + node.Scalar() + "' is not a finite number");
  return *v;
}

std::string as_string(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a scalar");
  return node.Scalar();
}

Vec3 as_vec3(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() != 3) fail(node, field, "expected three numbers");
  return {as_double(node[0], field), as_double(node[1], field), as_double(node[2], field)};
}

bool as_bool(const YAML::Node& node, const std::string& field) {
  const std::string s = as_string(node, field);
  if (s == "true") return true;
  if (s == "false") return false;
  fail(node, field, "expected true or false");
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v == 0.0 ? 0.0 : v);
  return buf;
}

std::string vec_text(const Vec3& v) {
  return "[" + format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z()) +
         "]";
}

} // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) throw InputError("cannot serialise a non-finite number");
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) return std::nullopt;
  return v;
}

std::string format_sci(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", significant - 1, v);
  return buf;
}

std::string format_sig(double v, int significant) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

// ---- structures ------------------------------------------------------------

StructureFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".xyz" ? StructureFormat::Xyz : StructureFormat::Interchange;
}

std::string emit_interchange(const crystal::Structure& s) {
  std::string out;
  out += "format: surfspin-structure\n";
  out += "version: 1\n";
  out += "bond_cutoff: " + format_double(s.bond_cutoff) + "\n";
  out += "cell:\n  vectors:\n";
  for (const Vec3& v : s.cell.vectors) out += "    - " + vec_text(v) + "\n";
  out += "  periodic: [";
  for (int i = 0; i < 3; ++i) {
    out += s.cell.periodic[static_cast<std::size_t>(i)] ? "true" : "false";
    out += i < 2 ? ", " : "]\n";
  }
  out += "atom_count: " + std::to_string(s.atoms.size()) + "\n";
  out += "atoms:\n";
  for (const crystal::Atom& a : s.atoms) {
    out += "  - {species: " + a.species + ", position: " + vec_text(a.position) +
           ", role: " + std::string(crystal::role_name(a.role)) + "}\n";
  }
  return out;
}

crystal::Structure parse_interchange(std::string_view text) {
  const YAML::Node doc = load_document(text);
  if (!doc.IsDefined() || doc.IsNull()) throw ParseError(1, "format", "empty document");
  check_keys(doc, "document",
             {"format", "version", "bond_cutoff", "cell", "atom_count", "atoms"});
  const YAML::Node format = require(doc, "format", doc);
  if (as_string(format, "format") != "surfspin-structure") {
    fail(format, "format", "expected 'surfspin-structure'");
  }
  const YAML::Node version = require(doc, "version", doc);
  if (as_string(version, "version") != "1") fail(version, "version", "unsupported version");

  crystal::Structure s;
  s.bond_cutoff = as_double(require(doc, "bond_cutoff", doc), "bond_cutoff");
  if (!(s.bond_cutoff > 0.0)) fail(doc["bond_cutoff"], "bond_cutoff", "must be positive");

  const YAML::Node cell = require(doc, "cell", doc);
  check_keys(cell, "cell", {"vectors", "periodic"});
  const YAML::Node vectors = require(cell, "vectors", cell);
  if (!vectors.IsSequence() || vectors.size() != 3) {
    fail(vectors, "vectors", "expected three cell vectors");
  }
  for (std::size_t i = 0; i < 3; ++i) s.cell.vectors[i] = as_vec3(vectors[i], "vectors");
  const YAML::Node periodic = require(cell, "periodic", cell);
  if (!periodic.IsSequence() || periodic.size() != 3) {
    fail(periodic, "periodic", "expected three flags");
  }
  for (std::size_t i = 0; i < 3; ++i) s.cell.periodic[i] = as_bool(periodic[i], "periodic");

  const YAML::Node count = require(doc, "atom_count", doc);
  const auto expected = parse_double(as_string(count, "atom_count"));
  if (!expected || *expected < 0 || std::floor(*expected) != *expected) {
    fail(count, "atom_count", "expected a non-negative integer");
  }

  const YAML::Node atoms = doc["atoms"];
  if (atoms.IsDefined() && !atoms.IsNull()) {
    if (!atoms.IsSequence()) fail(atoms, "atoms", "expected a list");
    for (const YAML::Node& node : atoms) {
      check_keys(node, "atom", {"species", "position", "role"});
      crystal::Atom a;
      const YAML::Node species = require(node, "species", node);
      a.species = as_string(species, "species");
      try {
        crystal::valence(a.species);
      } catch (const InputError&) {
        fail(species, "species", "unsupported species '" + a.species + "'");
      }
      a.position = as_vec3(require(node, "position", node), "position");
      const YAML::Node role = require(node, "role", node);
      const auto parsed = crystal::parse_role(as_string(role, "role"));
      if (!parsed) fail(role, "role", "unknown role '" + role.Scalar() + "'");
      a.role = *parsed;
      s.atoms.push_back(std::move(a));
    }
  }
  if (static_cast<double>(s.atoms.size()) != *expected) {
    const int line = atoms.IsDefined() && atoms.size() > 0
                         ? line_of(atoms[atoms.size() - 1]) + 1
                         : line_of(count);
    throw ParseError(line, "atoms",
                     "expected " + count.Scalar() + " atoms, found " +
                         std::to_string(s.atoms.size()) + " (truncated file?)");
  }
  try {
    s.cell.validate();
  } catch (const GeometryError& e) {
    fail(vectors, "vectors", e.what());
  }
  return s;
}

std::string emit_xyz(const crystal::Structure& s) {
  std::string out = std::to_string(s.atoms.size()) + "\n";
  out += "Lattice=";
  for (std::size_t i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) {
      if (i != 0 || c != 0) out += ' ';
      out += fixed(s.cell.vectors[i][c], 6);
    }
  }
  out += "\n";
  for (const crystal::Atom& a : s.atoms) {
    out += a.species + " " + fixed(a.position.x(), 6) + " " + fixed(a.position.y(), 6) + " " +
           fixed(a.position.z(), 6) + "\n";
  }
  return out;
}

namespace {

crystal::Structure parse_xyz(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  auto next = [&](const char* field) {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, field, "unexpected end of file");
    ++line_no;
  };
  next("count");
  const auto count = parse_double(line);
  if (!count || *count < 0 || std::floor(*count) != *count) {
    throw ParseError(line_no, "count", "expected the atom count");
  }
  next("Lattice");
  if (line.rfind("Lattice=", 0) != 0) throw ParseError(line_no, "Lattice", "missing Lattice=");
  std::istringstream lat(line.substr(8));
  crystal::Structure s;
  for (std::size_t i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) {
      std::string tok;
      const auto v = (lat >> tok) ? parse_double(tok) : std::nullopt;
      if (!v) throw ParseError(line_no, "Lattice", "expected nine numbers");
      s.cell.vectors[i][c] = *v;
    }
  }
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -zmin;
  for (std::size_t k = 0; k < static_cast<std::size_t>(*count); ++k) {
    next("atom");
    std::istringstream row(line);
    std::string species, x, y, z;
    if (!(row >> species >> x >> y >> z)) throw ParseError(line_no, "atom", "expected 'El x y z'");
    const auto px = parse_double(x), py = parse_double(y), pz = parse_double(z);
    if (!px || !py || !pz) throw ParseError(line_no, "position", "malformed coordinate");
    s.atoms.push_back({species, Vec3(*px, *py, *pz), crystal::Role::Bulk});
    zmin = std::min(zmin, *pz);
    zmax = std::max(zmax, *pz);
  }
  // XYZ carries no periodicity; a gap of several Å along c marks a slab.
  constexpr double vacuum_hint_A = 5.0;
  const double c_len = s.cell.vectors[2].norm();
  s.cell.periodic = {true, true, s.atoms.empty() || c_len - (zmax - zmin) < vacuum_hint_A};
  s.cell.validate();
  return s;
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

crystal::Structure parse_structure(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return format_for_path(path) == StructureFormat::Xyz ? parse_xyz(text)
                                                       : parse_interchange(text);
}

void emit_structure(const crystal::Structure& s, const std::filesystem::path& path,
                    StructureFormat format) {
  write_text_file(path, format == StructureFormat::Xyz ? emit_xyz(s) : emit_interchange(s));
}

// ---- hyperfine fixture -----------------------------------------------------

AisoFixture parse_aiso_fixture(std::string_view text) {
  const YAML::Node doc = load_document(text);
  if (!doc.IsDefined() || doc.IsNull()) throw ParseError(1, "a_iso_MHz", "empty document");
  check_keys(doc, "fixture", {"field_direction", "spin_center", "a_iso_MHz"});
  AisoFixture f;
  if (doc["field_direction"]) {
    f.field_direction = as_vec3(doc["field_direction"], "field_direction");
    if (!(f.field_direction.norm() > 0.0)) {
      fail(doc["field_direction"], "field_direction", "must be non-zero");
    }
  }
  const YAML::Node center = require(doc, "spin_center", doc);
  check_keys(center, "spin_center", {"lobe_offset_A"});
  f.lobe_offset_A = as_double(require(center, "lobe_offset_A", center), "lobe_offset_A");
  if (!(f.lobe_offset_A > 0.0)) fail(center, "lobe_offset_A", "must be positive");

  const YAML::Node entries = require(doc, "a_iso_MHz", doc);
  if (!entries.IsSequence()) fail(entries, "a_iso_MHz", "expected a list");
  for (const YAML::Node& node : entries) {
    check_keys(node, "a_iso entry", {"selector", "value", "alternatives"});
    AisoEntry e;
    e.selector = as_string(require(node, "selector", node), "selector");
    e.value_MHz = as_double(require(node, "value", node), "value");
    if (const YAML::Node alt = node["alternatives"]) {
      if (!alt.IsSequence()) fail(alt, "alternatives", "expected a list");
      for (const YAML::Node& v : alt) e.alternatives_MHz.push_back(as_double(v, "alternatives"));
    }
    f.entries.push_back(std::move(e));
  }
  return f;
}

std::string_view step_fixture_text() { return embedded_step_fixture; }

AisoFixture step_fixture() { return parse_aiso_fixture(step_fixture_text()); }

std::vector<std::size_t> resolve_selector(const crystal::Structure& s, std::string_view selector) {
  const auto colon = selector.find(':');
  if (colon == std::string_view::npos) {
    throw InputError("selector '" + std::string(selector) + "' lacks a kind prefix");
  }
  const std::string_view kind = selector.substr(0, colon);
  const std::string_view arg = selector.substr(colon + 1);
  std::vector<std::size_t> out;

  auto roles_matching = [&](std::string_view role_text) {
    const auto role = crystal::parse_role(role_text);
    if (!role) throw InputError("unknown role in selector '" + std::string(selector) + "'");
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
      if (s.atoms[i].role == *role) hits.push_back(i);
    }
    return hits;
  };

  if (kind == "role") return roles_matching(arg);
  if (kind == "index") {
    const auto v = parse_double(arg);
    if (!v || *v < 0 || std::floor(*v) != *v) {
      throw InputError("bad index in selector '" + std::string(selector) + "'");
    }
    if (*v < static_cast<double>(s.atoms.size())) out.push_back(static_cast<std::size_t>(*v));
    return out;
  }
  if (kind == "oh-h-on") {
    // Hydroxyl hydrogens whose oxygen is bonded to an atom of the given role.
    const std::set<std::size_t> hosts = [&] {
      const auto v = roles_matching(arg);
      return std::set<std::size_t>(v.begin(), v.end());
    }();
    const crystal::Adjacency adj = crystal::neighbor_list(s);
    for (std::size_t i = 0; i < s.atoms.size(); ++i) {
      if (s.atoms[i].species != "H" || s.atoms[i].role != crystal::Role::TerminatorOH) continue;
      for (const crystal::Neighbor& o : adj[i]) {
        if (s.atoms[o.index].species != "O") continue;
        const bool on_host = std::any_of(adj[o.index].begin(), adj[o.index].end(),
                                         [&](const crystal::Neighbor& c) {
                                           return hosts.count(c.index) > 0;
                                         });
        if (on_host) {
          out.push_back(i);
          break;
        }
      }
    }
    return out;
  }
  throw InputError("unknown selector kind '" + std::string(kind) + "'");
}

std::map<std::size_t, double> resolve_aiso(const AisoFixture& fixture,
                                           const crystal::Structure& s) {
  std::map<std::size_t, double> out;
  for (const AisoEntry& e : fixture.entries) {
    for (std::size_t i : resolve_selector(s, e.selector)) out[i] = e.value_MHz;
  }
  return out;
}

// ---- run configuration -----------------------------------------------------

std::string emit_config(const RunConfig& config) {
  YAML::Emitter em;
  em << YAML::BeginMap;
  em << YAML::Key << "command" << YAML::Value << config.command;
  em << YAML::Key << "options" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : config.options) {
    em << YAML::Key << k << YAML::Value << YAML::DoubleQuoted << v;
  }
  em << YAML::EndMap << YAML::EndMap;
  return std::string(em.c_str()) + "\n";
}

RunConfig parse_config(std::string_view text) {
  const YAML::Node doc = load_document(text);
  if (!doc.IsDefined() || doc.IsNull()) throw ParseError(1, "command", "empty document");
  check_keys(doc, "config", {"command", "options"});
  RunConfig c;
  c.command = as_string(require(doc, "command", doc), "command");
  if (const YAML::Node opts = doc["options"]; opts.IsDefined() && !opts.IsNull()) {
    if (!opts.IsMap()) fail(opts, "options", "expected a mapping");
    for (const auto& kv : opts) {
      const std::string key = kv.first.Scalar();
      std::string value;
      if (kv.second.IsSequence()) {
        for (const YAML::Node& item : kv.second) {
          if (!value.empty()) value += ",";
          value += as_string(item, key);
        }
      } else {
        value = as_string(kv.second, key);
      }
      c.options.emplace_back(key, value);
    }
  }
  return c;
}

// ---- tables ----------------------------------------------------------------

std::string scan_csv(const std::vector<hyperfine::ScanRow>& rows) {
  std::string out = "atom_index,element,isotope,a_MHz,b_MHz,flagged\n";
  for (const auto& r : rows) {
    out += std::to_string(r.atom) + "," + r.element + "," + r.isotope + "," + fixed(r.a, 6) +
           "," + fixed(r.b, 6) + "," + (r.flagged ? "1" : "0") + "\n";
  }
  return out;
}

std::string dbs_csv(const crystal::Structure& s, const crystal::DbReport& report) {
  std::string out = "atom_index,element,role,db_count,dir_x,dir_y,dir_z\n";
  for (const auto& e : report.entries) {
    const Vec3 d = e.direction.value_or(Vec3::Zero());
    out += std::to_string(e.atom) + "," + s.atoms[e.atom].species + "," +
           std::string(crystal::role_name(s.atoms[e.atom].role)) + "," +
           std::to_string(e.db_count) + "," + fixed(d.x(), 6) + "," + fixed(d.y(), 6) + "," +
           fixed(d.z(), 6) + "\n";
  }
  return out;
}

std::string fit_csv(const std::vector<hyperfine::GeometrySolution>& solutions) {
  std::string out = "r_A,theta_deg,residual_MHz\n";
  for (const auto& s : solutions) {
    out += format_sig(s.r, 9) + "," + format_sig(s.theta_deg, 9) + "," +
           format_sci(s.residual, 3) + "\n";
  }
  return out;
}

std::string trace_csv(const std::vector<spindynamics::EchoSample>& trace) {
  std::string out = "tau_us,E\n";
  for (const auto& s : trace) out += format_sig(s.tau_us, 9) + "," + format_sig(s.E, 9) + "\n";
  return out;
}

std::string coverage_csv(const kinetics::CoverageTrajectory& trajectory) {
  std::string out = "t_s,theta\n";
  for (const auto& s : trajectory) {
    out += format_sig(s.t_s, 9) + "," + format_sig(s.theta, 9) + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepBlock>& blocks) {
  std::string out = "T_K,T_C,rate_per_s\n";
  for (const auto& block : blocks) {
    out += "# barrier_eV=" + format_sig(block.barrier_eV, 6) + "\n";
    for (const auto& s : block.samples) {
      out += format_sci(s.T_K, 6) + "," + format_sci(s.T_K - constants::celsius_offset_K, 6) +
             "," + format_sci(s.rate, 6) + "\n";
      if (s.flag == kinetics::RangeFlag::Underflow) {
        out += "# underflow: rate below double range at T_K=" + format_sci(s.T_K, 6) + "\n";
      }
    }
  }
  return out;
}

std::string anneal_csv(const std::vector<AnnealRow>& rows) {
  std::string out =
      "E_eV,T_K,T_C,rate_per_s,desorbed_per_cm2,remaining_per_cm2,time_to_clear_s,flags\n";
  for (const auto& r : rows) {
    std::string flags;
    if (r.rate.flag == kinetics::RangeFlag::Underflow) flags = "rate-underflow";
    if (r.depletion.flag == kinetics::RangeFlag::Underflow) {
      flags += flags.empty() ? "coverage-underflow" : ";coverage-underflow";
    }
    out += format_sig(r.barrier_eV, 6) + "," + format_sci(r.T_K, 6) + "," +
           format_sci(r.T_K - constants::celsius_offset_K, 6) + "," +
           format_sci(r.rate.rate, 6) + "," + format_sci(r.depletion.desorbed, 6) + "," +
           format_sci(r.depletion.remaining, 6) + "," +
           (r.time_to_clear_s ? format_sci(*r.time_to_clear_s, 6) : std::string("inf")) + "," +
           flags + "\n";
  }
  return out;
}

} // namespace surfspin::io
