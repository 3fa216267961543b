#pragma once

#include <optional>
#include <string_view>

#include "surfspin/crystal.hpp"
#include "surfspin/hyperfine.hpp"
#include "surfspin/termination.hpp"

namespace surfspin::presets {

/// Capping of the step bridge / trench-adjacent pair next to the raised carbon.
enum class EdgeVariant {
  OHH,   ///< O-bridge on the step, H in the trench
  OOHOH, ///< O-bridge on the step, OH in the trench
  OHOH,  ///< H on the step, OH in the trench
};

std::string_view edge_variant_name(EdgeVariant v); // "O/H/H", "O/OH/OH", "OH/OH"
std::optional<EdgeVariant> parse_edge_variant(std::string_view name);

/// Bottom and trench H, terrace O-bridges, floating carbon OH, db-host left open.
crystal::TerminationRules step_rules(EdgeVariant variant);

struct SlabOptions {
  double lattice = constants::diamond_lattice_A;
  int layers = 9;
  int lateral = 6;
  double vacuum = 10.0;
};

struct PaperStepOptions {
  SlabOptions slab;
  int upper_terrace = 3;
  EdgeVariant variant = EdgeVariant::OHH;
};

struct PaperStep {
  crystal::Structure stepped;   ///< carved, unterminated
  crystal::Structure raised;    ///< after moving the trench carbon, unterminated
  crystal::Structure terminated;
  std::size_t floating = 0;
  std::size_t host = 0;
};

/// Slab, single-layer step, raised trench carbon, termination.
PaperStep build_paper_step(const PaperStepOptions& options = {});

/// Fully H-terminated flat slab.
crystal::Structure build_flat(const SlabOptions& options = {});

/// One conventional diamond cell.
crystal::Structure build_bulk_cell(double lattice = constants::diamond_lattice_A);

/// A single point spin on the lobe of the structure's only singly
/// undercoordinated carbon, `offset` Å along its dangling-bond direction.
hyperfine::SpinCenter db_lobe_center(const crystal::Structure& s, double offset);

} // namespace surfspin::presets
