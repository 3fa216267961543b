#include "surfspin/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "surfspin/crystal.hpp"
#include "surfspin/error.hpp"
#include "surfspin/hyperfine.hpp"
#include "surfspin/io.hpp"
#include "surfspin/kinetics.hpp"
#include "surfspin/presets.hpp"
#include "surfspin/spindynamics.hpp"
#include "surfspin/termination.hpp"

namespace surfspin::cli {

namespace {

const std::vector<std::string> commands{"build", "dbs",    "hfi",    "fit",
                                        "eseem", "desorb", "anneal", "sweep"};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = io::parse_double(item);
    if (!v) throw InputError("--" + flag + ": '" + item + "' is not a number");
    out.push_back(*v);
  }
  if (out.empty()) throw InputError("--" + flag + " needs at least one value");
  return out;
}

Vec3 parse_vec3(const std::string& text, const std::string& flag) {
  const auto v = parse_list(text, flag);
  if (v.size() != 3) throw InputError("--" + flag + " expects x,y,z");
  return {v[0], v[1], v[2]};
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct Sink {
  std::ostream& out;
  std::ostream& err;
  std::string out_path;

  void data(const std::string& text) const {
    if (out_path.empty()) {
      out << text;
    } else {
      io::write_text_file(out_path, text);
    }
  }
  void summary(const std::string& line) const { (out_path.empty() ? err : out) << line << "\n"; }
};

// ---- structure source ------------------------------------------------------

struct StructureArgs {
  std::string preset = "paper-step";
  std::string variant = "O/H/H";
  std::string structure_path;
  double lattice = constants::diamond_lattice_A;
  int layers = 9;
  int lateral = 6;
  double vacuum = 10.0;
  int terrace = 3;
  std::string stage = "terminated";

  void add_to(CLI::App* app, bool geometry_flags) {
    app->add_option("--preset", preset, "Structure preset")
        ->check(CLI::IsMember({"paper-step", "flat", "bulk"}));
    app->add_option("--edge-variant", variant, "Edge capping for paper-step")
        ->check(CLI::IsMember({"O/H/H", "O/OH/OH", "OH/OH"}));
    if (geometry_flags) {
      app->add_option("--lattice", lattice, "Lattice parameter (Å)");
      app->add_option("--layers", layers, "Carbon layers");
      app->add_option("--lateral", lateral, "Lateral repeats (n for an n x n cell)");
      app->add_option("--vacuum", vacuum, "Vacuum gap (Å)");
      app->add_option("--terrace", terrace, "Upper terrace width (rows)");
      app->add_option("--stage", stage, "Pipeline stage to emit for paper-step")
          ->check(CLI::IsMember({"stepped", "raised", "terminated"}));
    } else {
      app->add_option("--structure", structure_path, "Interchange or XYZ structure file");
    }
  }

  crystal::Structure load() const {
    if (!structure_path.empty()) return io::parse_structure(structure_path);
    const presets::SlabOptions slab{lattice, layers, lateral, vacuum};
    if (preset == "bulk") return presets::build_bulk_cell(lattice);
    if (preset == "flat") return presets::build_flat(slab);
    presets::PaperStepOptions opts;
    opts.slab = slab;
    opts.upper_terrace = terrace;
    opts.variant = *presets::parse_edge_variant(variant);
    const presets::PaperStep step = presets::build_paper_step(opts);
    if (stage == "stepped") return step.stepped;
    if (stage == "raised") return step.raised;
    return step.terminated;
  }
};

// ---- subcommands -----------------------------------------------------------

struct Options {
  StructureArgs structure;
  std::string format;
  // hfi
  std::string fixture_path;
  std::string field;
  double threshold = 10.0;
  std::optional<double> lobe_offset;
  // fit / eseem
  double a = 0.0;
  double b = 0.0;
  double a_iso = 0.0;
  std::string isotope = "1H";
  std::optional<double> omega_I;
  std::optional<double> field_T;
  double omega_S = 0.0;
  double tau_max = 2.0;
  int points = 201;
  // kinetics
  double barrier = 1.12;
  double nu = 1.0e15;
  double order = 1.0;
  std::optional<double> temp_c;
  std::optional<double> temp_k;
  double theta0 = 1.0;
  std::optional<double> t_max;
  std::string barriers = "0.89,0.96,1.12";
  std::string temps_c = "465,600";
  double duration = 3600.0;
  double n0 = 4.4e13;
  std::optional<double> t_min_c, t_max_c, t_min_k, t_max_k;
  int steps = 41;
  // common
  std::string out_path;
  std::string config_path;
};

hyperfine::IsotopeSpec isotope_or_throw(const std::string& symbol) {
  const auto iso = hyperfine::find_isotope(symbol);
  if (!iso) throw InputError("unknown isotope '" + symbol + "' (use 1H or 13C)");
  return *iso;
}

void cmd_build(const Options& o, const Sink& sink) {
  const crystal::Structure s = o.structure.load();
  io::StructureFormat format = io::StructureFormat::Interchange;
  if (o.format == "xyz") {
    format = io::StructureFormat::Xyz;
  } else if (o.format.empty() && !o.out_path.empty()) {
    format = io::format_for_path(o.out_path);
  }
  sink.data(format == io::StructureFormat::Xyz ? io::emit_xyz(s) : io::emit_interchange(s));

  const crystal::DbReport dbs = crystal::enumerate_dbs(s);
  const int total = dbs.total();
  sink.summary("atoms=" + std::to_string(s.atoms.size()) + " dbs=" + std::to_string(total) +
               " cell_side_A=" + fmt("%.3f", s.cell.vectors[0].norm()) +
               " density_per_cm2=" + fmt("%.3g", crystal::spin_areal_density(s, total)));
}

void cmd_dbs(const Options& o, const Sink& sink) {
  const crystal::Structure s = o.structure.load();
  const crystal::DbReport dbs = crystal::enumerate_dbs(s);
  sink.data(io::dbs_csv(s, dbs));
  sink.summary("dbs=" + std::to_string(dbs.total()) +
               " undercoordinated_atoms=" + std::to_string(dbs.entries.size()));
}

void cmd_hfi(const Options& o, const Sink& sink) {
  const crystal::Structure s = o.structure.load();
  const io::AisoFixture fixture = o.fixture_path.empty()
                                      ? io::step_fixture()
                                      : io::parse_aiso_fixture(io::read_text_file(o.fixture_path));
  const Vec3 field = o.field.empty() ? fixture.field_direction : parse_vec3(o.field, "field");
  const hyperfine::SpinCenter center =
      presets::db_lobe_center(s, o.lobe_offset.value_or(fixture.lobe_offset_A));
  const auto rows =
      hyperfine::scan_structure(s, center, field, io::resolve_aiso(fixture, s), o.threshold);
  sink.data(io::scan_csv(rows));

  const auto flagged = std::count_if(rows.begin(), rows.end(),
                                     [](const hyperfine::ScanRow& r) { return r.flagged; });
  std::string line = "nuclei=" + std::to_string(rows.size()) +
                     " flagged=" + std::to_string(flagged);
  for (const auto& r : rows) {
    if (s.atoms[r.atom].role == crystal::Role::DbHost) {
      line += " host_13C_a=" + fmt("%.1f", r.a) + " host_13C_b=" + fmt("%.1f", r.b);
    }
  }
  sink.summary(line);
}

void cmd_fit(const Options& o, const Sink& sink) {
  const auto sols = hyperfine::fit_geometry(o.a, o.b, o.a_iso, isotope_or_throw(o.isotope));
  sink.data(io::fit_csv(sols));
  std::string line = "solutions=" + std::to_string(sols.size());
  if (!sols.empty()) {
    line += " r_A=" + fmt("%.3f", sols.front().r) +
            " theta_deg=" + fmt("%.2f", sols.front().theta_deg);
  }
  sink.summary(line);
}

void cmd_eseem(const Options& o, const Sink& sink) {
  double omega_I = 0.0;
  if (o.omega_I) {
    omega_I = *o.omega_I;
  } else if (o.field_T) {
    omega_I = spindynamics::larmor(isotope_or_throw(o.isotope), *o.field_T);
  } else {
    throw InputError("eseem needs --omega-i or --field-t");
  }
  if (o.points < 2) throw InputError("--points must be at least 2");
  if (!(o.tau_max > 0.0)) throw InputError("--tau-max must be positive");
  std::vector<double> tau(static_cast<std::size_t>(o.points));
  for (int i = 0; i < o.points; ++i) tau[static_cast<std::size_t>(i)] = o.tau_max * i / (o.points - 1);
  const spindynamics::SpinPairHamiltonian h{o.omega_S, omega_I, o.a, o.b};
  sink.data(io::trace_csv(spindynamics::two_pulse_eseem(h, tau)));
  const auto f = spindynamics::nuclear_frequencies(h);
  sink.summary("omega_alpha_MHz=" + fmt("%.6g", f.omega_alpha) +
               " omega_beta_MHz=" + fmt("%.6g", f.omega_beta) + " k=" + fmt("%.6g", f.k));
}

double temperature_K(const std::optional<double>& c, const std::optional<double>& k,
                     double default_c) {
  if (k) return *k;
  return c.value_or(default_c) + constants::celsius_offset_K;
}

kinetics::DesorptionModel model_for(const Options& o, double barrier) {
  kinetics::DesorptionModel m{barrier, o.nu, o.order};
  m.validate();
  return m;
}

void cmd_desorb(const Options& o, const Sink& sink) {
  const kinetics::DesorptionModel m = model_for(o, o.barrier);
  const double T = temperature_K(o.temp_c, o.temp_k, 465.0);
  const kinetics::RateSample rate = kinetics::evaluate_rate(m, T);
  if (rate.flag == kinetics::RangeFlag::Underflow && !o.t_max) {
    throw NumericalError("rate underflows at this temperature; pass --t-max explicitly");
  }
  if (o.points < 2) throw InputError("--points must be at least 2");
  const double t_max = o.t_max.value_or(10.0 / rate.rate);
  if (!(t_max > 0.0)) throw InputError("--t-max must be positive");
  std::vector<double> t(static_cast<std::size_t>(o.points));
  for (int i = 0; i < o.points; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (o.points - 1);
  sink.data(io::coverage_csv(kinetics::coverage_trajectory(m, T, o.theta0, t)));
  std::string line = "T_K=" + fmt("%.2f", T) + " rate_per_s=" + fmt("%.6e", rate.rate);
  if (rate.flag == kinetics::RangeFlag::Ok) {
    line += " t_half_s=" + fmt("%.6e", kinetics::time_to_fraction(m, T, 0.5));
  } else {
    line += " flag=rate-underflow";
  }
  sink.summary(line);
}

void cmd_anneal(const Options& o, const Sink& sink) {
  if (!(o.n0 > 1.0)) throw InputError("--n0 must exceed 1 spin per cm^2");
  const auto barriers = parse_list(o.barriers, "barriers");
  const auto temps = parse_list(o.temps_c, "temps-c");
  std::vector<io::AnnealRow> rows;
  for (double E : barriers) {
    const kinetics::DesorptionModel m = model_for(o, E);
    for (double tc : temps) {
      const double T = tc + constants::celsius_offset_K;
      io::AnnealRow row;
      row.barrier_eV = E;
      row.T_K = T;
      row.rate = kinetics::evaluate_rate(m, T);
      row.depletion = kinetics::desorbed_after(m, T, o.duration, o.n0);
      // Cleared once fewer than one spin per cm^2 remains.
      if (row.rate.flag == kinetics::RangeFlag::Ok) {
        row.time_to_clear_s = kinetics::time_to_fraction(m, T, 1.0 / o.n0);
      }
      rows.push_back(row);
    }
  }
  sink.data(io::anneal_csv(rows));

  std::string line = "rows=" + std::to_string(rows.size());
  if (temps.size() >= 2) {
    line += " rate_ratio";
    for (double E : barriers) {
      const kinetics::DesorptionModel m = model_for(o, E);
      const double hi = kinetics::rate_constant(m, temps.back() + constants::celsius_offset_K);
      const double lo = kinetics::rate_constant(m, temps.front() + constants::celsius_offset_K);
      line += (E == barriers.front() ? "=" : "/") + fmt("%.2f", lo > 0.0 ? hi / lo : INFINITY);
    }
  }
  sink.summary(line);
}

void cmd_sweep(const Options& o, const Sink& sink) {
  if (o.t_min_c && o.t_min_k) throw InputError("give --t-min-c or --t-min-k, not both");
  if (o.t_max_c && o.t_max_k) throw InputError("give --t-max-c or --t-max-k, not both");
  const double t_min = temperature_K(o.t_min_c, o.t_min_k, 300.0);
  const double t_max = temperature_K(o.t_max_c, o.t_max_k, 700.0);
  const double markers[] = {kinetics::anneal_marker_low_K, kinetics::anneal_marker_high_K};

  auto barriers = parse_list(o.barriers, "barriers");
  std::vector<io::SweepBlock> blocks;
  for (double E : barriers) {
    blocks.push_back({E, kinetics::temperature_sweep(model_for(o, E), t_min, t_max, o.steps,
                                                     markers)});
  }
  sink.data(io::sweep_csv(blocks));

  // Lower barriers must be faster at every temperature.
  std::vector<std::size_t> order(barriers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t l, std::size_t r) { return barriers[l] < barriers[r]; });
  bool ordered = true;
  for (std::size_t row = 0; row < blocks.front().samples.size(); ++row) {
    for (std::size_t k = 1; k < order.size(); ++k) {
      const double faster = blocks[order[k - 1]].samples[row].rate;
      const double slower = blocks[order[k]].samples[row].rate;
      if (!(faster > slower) && barriers[order[k - 1]] < barriers[order[k]]) ordered = false;
    }
  }
  sink.summary("curves=" + std::to_string(blocks.size()) +
               " points=" + std::to_string(blocks.front().samples.size()) +
               " ordering=" + (ordered ? "strict" : "violated"));
}

// ---- wiring ----------------------------------------------------------------

struct Command {
  CLI::App* app;
  void (*handler)(const Options&, const Sink&);
};

std::vector<Command> declare(CLI::App& app, Options& o) {
  std::vector<Command> cmds;
  auto sub = [&](const char* name, const char* help, void (*fn)(const Options&, const Sink&)) {
    CLI::App* s = app.add_subcommand(name, help);
    s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s->add_option("--out", o.out_path, "Write the output table or structure here");
    s->add_option("--config", o.config_path, "Structured-text file holding default options");
    cmds.push_back({s, fn});
    return s;
  };

  CLI::App* build = sub("build", "Build a structure and write it", cmd_build);
  o.structure.add_to(build, true);
  build->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"xyz", "interchange"}));

  CLI::App* dbs = sub("dbs", "List dangling bonds of a structure", cmd_dbs);
  o.structure.add_to(dbs, false);

  CLI::App* hfi = sub("hfi", "Scan hyperfine couplings over H and C nuclei", cmd_hfi);
  o.structure.add_to(hfi, false);
  hfi->add_option("--fixture", o.fixture_path, "Fermi-contact fixture (default: built in)");
  hfi->add_option("--field", o.field, "Field direction x,y,z");
  hfi->add_option("--threshold", o.threshold, "Flag rows with max(|a|, b) at or above (MHz)");
  hfi->add_option("--lobe-offset", o.lobe_offset, "Spin-site offset along the DB (Å)");

  CLI::App* fit = sub("fit", "Invert (a, b) to distance and angle", cmd_fit);
  fit->add_option("--a", o.a, "Secular coupling (MHz)")->required();
  fit->add_option("--b", o.b, "Pseudo-secular coupling (MHz)")->required();
  fit->add_option("--a-iso", o.a_iso, "Fermi-contact term (MHz)");
  fit->add_option("--isotope", o.isotope, "1H or 13C");

  CLI::App* eseem = sub("eseem", "Two-pulse echo envelope", cmd_eseem);
  eseem->add_option("--a", o.a, "Secular coupling (MHz)")->required();
  eseem->add_option("--b", o.b, "Pseudo-secular coupling (MHz)")->required();
  eseem->add_option("--omega-i", o.omega_I, "Nuclear Larmor frequency (MHz)");
  eseem->add_option("--field-t", o.field_T, "Field (T); sets the Larmor frequency");
  eseem->add_option("--isotope", o.isotope, "1H or 13C");
  eseem->add_option("--omega-s", o.omega_S, "Electron Zeeman frequency (MHz)");
  eseem->add_option("--tau-max", o.tau_max, "Largest tau (us)");
  eseem->add_option("--points", o.points, "Number of tau samples");

  auto kinetics_flags = [&](CLI::App* s) {
    s->add_option("--nu", o.nu, "Attempt frequency (1/s)");
    s->add_option("--order", o.order, "Reaction order");
  };

  CLI::App* desorb = sub("desorb", "Coverage decay at fixed temperature", cmd_desorb);
  kinetics_flags(desorb);
  desorb->add_option("--barrier", o.barrier, "Desorption barrier (eV)");
  desorb->add_option("--temp-c", o.temp_c, "Temperature (°C)");
  desorb->add_option("--temp-k", o.temp_k, "Temperature (K)");
  desorb->add_option("--theta0", o.theta0, "Initial coverage");
  desorb->add_option("--t-max", o.t_max, "End time (s); default 10/k");
  desorb->add_option("--points", o.points, "Number of time samples");

  CLI::App* anneal = sub("anneal", "Spin removal after a fixed-temperature anneal", cmd_anneal);
  kinetics_flags(anneal);
  anneal->add_option("--barriers", o.barriers, "Comma-separated barriers (eV)");
  anneal->add_option("--temps-c", o.temps_c, "Comma-separated temperatures (°C)");
  anneal->add_option("--duration", o.duration, "Anneal time (s)");
  anneal->add_option("--n0", o.n0, "Initial spin density (1/cm^2)");

  CLI::App* sweep = sub("sweep", "Rate constants over a temperature range", cmd_sweep);
  kinetics_flags(sweep);
  sweep->add_option("--barriers", o.barriers, "Comma-separated barriers (eV)");
  sweep->add_option("--t-min-c", o.t_min_c, "Lowest temperature (°C)");
  sweep->add_option("--t-max-c", o.t_max_c, "Highest temperature (°C)");
  sweep->add_option("--t-min-k", o.t_min_k, "Lowest temperature (K)");
  sweep->add_option("--t-max-k", o.t_max_k, "Highest temperature (K)");
  sweep->add_option("--steps", o.steps, "Grid points");

  desorb->get_option("--points")->default_val(101);
  return cmds;
}

/// Splices options from a --config file in front of the command-line flags so
/// explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  auto it = std::find(args.begin(), args.end(), "--config");
  std::string path;
  if (it != args.end()) {
    if (std::next(it) == args.end()) throw InputError("--config needs a path");
    path = *std::next(it);
  } else {
    for (const std::string& a : args) {
      if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    }
  }
  if (path.empty()) return args;

  const io::RunConfig config = io::parse_config(io::read_text_file(path));
  std::vector<std::string> rest = args;
  const bool has_command =
      !rest.empty() && std::find(commands.begin(), commands.end(), rest.front()) != commands.end();
  if (has_command && rest.front() != config.command) {
    throw InputError("config is for '" + config.command + "' but the command is '" +
                     rest.front() + "'");
  }
  if (!has_command) rest.insert(rest.begin(), config.command);
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(config.command);
  } catch (const CLI::OptionNotFound&) {
    throw InputError("config names unknown command '" + config.command + "'");
  }

  std::vector<std::string> injected;
  for (const auto& [key, value] : config.options) {
    if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
      throw InputError("config: unknown option '" + key + "' for command '" + config.command +
                       "'");
    }
    injected.push_back("--" + key);
    injected.push_back(value);
  }
  rest.insert(rest.begin() + 1, injected.begin(), injected.end());
  return rest;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diamond surface spin toolkit: step-model geometry, hyperfine couplings, "
               "echo envelopes and desorption kinetics",
               "surfspin"};
  app.require_subcommand(1);
  Options options;
  const std::vector<Command> cmds = declare(app, options);

  try {
    std::vector<std::string> argv = expand_config(args, app);
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return exit_input_error;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }

  try {
    for (const Command& c : cmds) {
      if (c.app->parsed()) c.handler(options, Sink{out, err, options.out_path});
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return exit_numerical_error;
  }
  return exit_ok;
}

} // namespace surfspin::cli
