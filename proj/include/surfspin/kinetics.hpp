#pragma once

#include <span>
#include <vector>

namespace surfspin::kinetics {

/// Polanyi-Wigner parameters: R = nu exp(-E / kT) theta^n.
struct DesorptionModel {
  double barrier_eV = 1.0;
  double prefactor_per_s = 1.0e15;
  double order = 1.0;

  /// Throws InputError unless barrier, prefactor and order are positive.
  void validate() const;
};

/// Set when exp(-E/kT) leaves the normal double range. The value is then 0 and
/// must not be read as an exact rate.
enum class RangeFlag { Ok, Underflow };

struct RateSample {
  double T_K = 0.0;
  double rate = 0.0;
  RangeFlag flag = RangeFlag::Ok;
};

/// nu exp(-E / (k_B T)) in 1/s. Throws InputError for T <= 0.
double rate_constant(const DesorptionModel& m, double T_K);
RateSample evaluate_rate(const DesorptionModel& m, double T_K);

struct CoverageSample {
  double t_s = 0.0;
  double theta = 0.0;
};
using CoverageTrajectory = std::vector<CoverageSample>;

/// theta(t) on `t_grid` (seconds, increasing, non-negative). First order uses
/// the exact exponential; other orders integrate numerically.
CoverageTrajectory coverage_trajectory(const DesorptionModel& m, double T_K, double theta0,
                                       std::span<const double> t_grid);
/// Always integrates numerically, including n = 1.
CoverageTrajectory coverage_trajectory_numeric(const DesorptionModel& m, double T_K,
                                               double theta0, std::span<const double> t_grid);

/// Time for the coverage to fall from 1 to `fraction`. Throws InputError for a
/// fraction outside (0, 1) and NumericalError when the rate underflows.
double time_to_fraction(const DesorptionModel& m, double T_K, double fraction);

/// Rates on `steps` evenly spaced temperatures. Marker temperatures inside the
/// range are inserted when not already on the grid. T_min == T_max yields one row.
std::vector<RateSample> temperature_sweep(const DesorptionModel& m, double T_min_K,
                                          double T_max_K, int steps,
                                          std::span<const double> markers_K = {});

/// The two annealing temperatures discussed for the spin-removal experiment.
inline constexpr double anneal_marker_low_K = 738.15;
inline constexpr double anneal_marker_high_K = 873.15;

struct Depletion {
  double desorbed = 0.0;  ///< per cm^2
  double remaining = 0.0; ///< per cm^2
  RangeFlag flag = RangeFlag::Ok;
};

/// Areal bookkeeping after `duration_s` at fixed temperature, starting from full
/// coverage. desorbed + remaining == N0 exactly.
Depletion desorbed_after(const DesorptionModel& m, double T_K, double duration_s, double N0);

} // namespace surfspin::kinetics
