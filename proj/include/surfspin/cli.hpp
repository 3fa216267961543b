#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace surfspin::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 2;
inline constexpr int exit_numerical_error = 3;

/// Runs one subcommand. `args` excludes the program name. Tabular output goes
/// to --out when given, otherwise to `out`; the one-line summary goes to `out`
/// when a file was written and to `err` otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace surfspin::cli
