#include "surfspin/presets.hpp"

#include "surfspin/error.hpp"

namespace surfspin::presets {

using crystal::SiteClass;
using crystal::Terminator;

std::string_view edge_variant_name(EdgeVariant v) {
  switch (v) {
  case EdgeVariant::OHH: return "O/H/H";
  case EdgeVariant::OOHOH: return "O/OH/OH";
  case EdgeVariant::OHOH: return "OH/OH";
  }
  return "O/H/H";
}

std::optional<EdgeVariant> parse_edge_variant(std::string_view name) {
  for (EdgeVariant v : {EdgeVariant::OHH, EdgeVariant::OOHOH, EdgeVariant::OHOH}) {
    if (edge_variant_name(v) == name) return v;
  }
  return std::nullopt;
}

crystal::TerminationRules step_rules(EdgeVariant variant) {
  crystal::TerminationRules rules{
      {SiteClass::Bottom, Terminator::H},       {SiteClass::Terrace, Terminator::OBridge},
      {SiteClass::Trench, Terminator::H},       {SiteClass::Floating, Terminator::OH},
      {SiteClass::DbHost, Terminator::None},
  };
  const bool bridge = variant != EdgeVariant::OHOH;
  rules[SiteClass::StepBridge] = bridge ? Terminator::OBridge : Terminator::H;
  rules[SiteClass::TrenchAdjacent] = variant == EdgeVariant::OHH ? Terminator::H : Terminator::OH;
  return rules;
}

PaperStep build_paper_step(const PaperStepOptions& options) {
  const SlabOptions& so = options.slab;
  const crystal::Structure slab =
      crystal::cut_slab(so.lattice, {1, 0, 0}, so.layers, {so.lateral, so.lateral}, so.vacuum);
  PaperStep out;
  out.stepped = crystal::carve_chadi_step(slab, crystal::StepAxis::Y, options.upper_terrace);
  const auto sites = crystal::trench_edge_sites(out.stepped);
  if (sites.empty()) throw GeometryError("stepped slab exposes no trench-edge carbon");
  out.raised = crystal::raise_trench_carbon(out.stepped, sites.front());
  out.floating = sites.front();
  for (std::size_t i = 0; i < out.raised.atoms.size(); ++i) {
    if (out.raised.atoms[i].role == crystal::Role::DbHost) out.host = i;
  }
  out.terminated = crystal::terminate(out.raised, step_rules(options.variant));
  return out;
}

crystal::Structure build_flat(const SlabOptions& options) {
  const crystal::Structure slab = crystal::cut_slab(
      options.lattice, {1, 0, 0}, options.layers, {options.lateral, options.lateral},
      options.vacuum);
  return crystal::terminate(slab, crystal::full_passivation());
}

crystal::Structure build_bulk_cell(double lattice) {
  return crystal::build_bulk(lattice, {1, 1, 1});
}

hyperfine::SpinCenter db_lobe_center(const crystal::Structure& s, double offset) {
  const crystal::DbReport report = crystal::enumerate_dbs(s);
  const crystal::DbEntry* single = nullptr;
  int count = 0;
  for (const crystal::DbEntry& e : report.entries) {
    if (s.atoms[e.atom].species == "C" && e.db_count == 1) {
      single = &e;
      ++count;
    }
  }
  if (count != 1 || report.entries.size() != 1) {
    throw InputError("spin center needs exactly one dangling bond; structure has " +
                     std::to_string(report.total()));
  }
  return hyperfine::SpinCenter::single(s.atoms[single->atom].position +
                                       offset * *single->direction);
}

} // namespace surfspin::presets
