#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "surfspin/crystal.hpp"
#include "surfspin/hyperfine.hpp"
#include "surfspin/kinetics.hpp"
#include "surfspin/spindynamics.hpp"

namespace surfspin::io {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Parses the whole of `text` as a double; nullopt on trailing garbage.
std::optional<double> parse_double(std::string_view text);

// ---- structures ------------------------------------------------------------

enum class StructureFormat { Xyz, Interchange };

/// Format implied by a file extension: .xyz, otherwise interchange (.yaml, .yml).
StructureFormat format_for_path(const std::filesystem::path& path);

std::string emit_interchange(const crystal::Structure& s);
/// Throws ParseError naming the line and field of the first problem.
crystal::Structure parse_interchange(std::string_view text);

std::string emit_xyz(const crystal::Structure& s);

crystal::Structure parse_structure(const std::filesystem::path& path);
void emit_structure(const crystal::Structure& s, const std::filesystem::path& path,
                    StructureFormat format);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

// ---- hyperfine fixture -----------------------------------------------------

struct AisoEntry {
  std::string selector; ///< "role:<role>", "index:<n>" or "oh-h-on:floating-C"
  double value_MHz = 0.0;
  std::vector<double> alternatives_MHz;
};

/// Fermi-contact inputs plus the spin-center and field used with them.
struct AisoFixture {
  Vec3 field_direction = Vec3::UnitZ();
  double lobe_offset_A = 0.0;
  std::vector<AisoEntry> entries;
};

AisoFixture parse_aiso_fixture(std::string_view text);
/// Built-in copy of the shipped step-model fixture.
AisoFixture step_fixture();
std::string_view step_fixture_text();

/// Atoms matched by a selector, in atom order. Unknown selector syntax throws
/// InputError; a selector matching nothing returns an empty list.
std::vector<std::size_t> resolve_selector(const crystal::Structure& s, std::string_view selector);
std::map<std::size_t, double> resolve_aiso(const AisoFixture& fixture,
                                           const crystal::Structure& s);

// ---- run configuration -----------------------------------------------------

/// A subcommand plus its options, as flag name (without dashes) -> value text.
struct RunConfig {
  std::string command;
  std::vector<std::pair<std::string, std::string>> options;

  bool operator==(const RunConfig&) const = default;
};

std::string emit_config(const RunConfig& config);
RunConfig parse_config(std::string_view text);

// ---- tables ----------------------------------------------------------------

std::string scan_csv(const std::vector<hyperfine::ScanRow>& rows);
std::string dbs_csv(const crystal::Structure& s, const crystal::DbReport& report);
std::string fit_csv(const std::vector<hyperfine::GeometrySolution>& solutions);
std::string trace_csv(const std::vector<spindynamics::EchoSample>& trace);
std::string coverage_csv(const kinetics::CoverageTrajectory& trajectory);

struct SweepBlock {
  double barrier_eV = 0.0;
  std::vector<kinetics::RateSample> samples;
};
std::string sweep_csv(const std::vector<SweepBlock>& blocks);

struct AnnealRow {
  double barrier_eV = 0.0;
  double T_K = 0.0;
  kinetics::RateSample rate;
  kinetics::Depletion depletion;
  std::optional<double> time_to_clear_s; ///< empty when the rate underflows
};
std::string anneal_csv(const std::vector<AnnealRow>& rows);

/// printf-style "%.{digits-1}e".
std::string format_sci(double v, int significant);
/// printf-style "%.{digits}g".
std::string format_sig(double v, int significant);

} // namespace surfspin::io
