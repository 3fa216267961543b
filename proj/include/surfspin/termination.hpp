#pragma once

#include <map>
#include <optional>
#include <string_view>

#include "surfspin/crystal.hpp"

namespace surfspin::crystal {

enum class Terminator { H, OBridge, OH, None };

/// Where an undercoordinated carbon sits relative to the step and the raised
/// carbon. Classes are mutually exclusive; the step-specific ones only appear
/// once a floating carbon is present.
enum class SiteClass {
  Bottom,         ///< lowest carbon layer
  Terrace,        ///< topmost carbon layer
  Trench,         ///< any other exposed carbon (lower terrace, facet)
  StepBridge,     ///< the top-layer carbon bonded to the floating carbon and its dimer partner
  TrenchAdjacent, ///< the two trench carbons nearest the floating carbon
  Floating,
  DbHost,
};

std::string_view terminator_name(Terminator t);
std::optional<Terminator> parse_terminator(std::string_view name);
std::string_view site_class_name(SiteClass c);
std::optional<SiteClass> parse_site_class(std::string_view name);

using TerminationRules = std::map<SiteClass, Terminator>;

/// Every class mapped to H.
TerminationRules full_passivation();

/// Class of each undercoordinated carbon, keyed by atom index.
std::map<std::size_t, SiteClass> classify_exposed_sites(const Structure& slab);

/// Caps dangling bonds according to `rules`. Heavy-atom positions are left
/// untouched; new atoms are appended in host order.
///
/// H sits 1.09 Å out along each missing sp3 direction. OH binds its O along the
/// free direction with the most room and tilts the hydroxyl H upward. An
/// O-bridge joins two carbons whose free directions aim at the same vacant
/// lattice site; its remaining bonds, or the whole site when no partner
/// exists, take H.
///
/// Throws IncompleteTerminationError when an exposed class has no rule and
/// GeometryError when the placed terminators clash.
Structure terminate(const Structure& slab, const TerminationRules& rules);

} // namespace surfspin::crystal
