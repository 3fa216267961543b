#include "surfspin/kinetics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/numeric/odeint.hpp>

#include "surfspin/constants.hpp"
#include "surfspin/error.hpp"

namespace surfspin::kinetics {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 1>;

constexpr double ode_abs_tol = 1e-13;
constexpr double ode_rel_tol = 1e-12;

void require_temperature(double T_K) {
  if (!(T_K > 0.0)) throw InputError("temperature must be positive (kelvin)");
}

void require_grid(std::span<const double> t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw InputError("time grid must be non-negative");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw InputError("time grid must be strictly increasing");
    }
  }
}

/// theta(s) for d theta / ds = -theta^n, s = k t, sampled at increasing s.
std::vector<double> integrate_reduced(double order, double theta0, std::span<const double> s) {
  auto rhs = [order](const State& x, State& dxdt, double) {
    dxdt[0] = -std::pow(std::max(x[0], 0.0), order);
  };
  std::vector<double> out;
  out.reserve(s.size());
  State x{theta0};
  double at = 0.0;
  auto stepper = odeint::make_dense_output(ode_abs_tol, ode_rel_tol,
                                           odeint::runge_kutta_dopri5<State>());
  for (double target : s) {
    if (target > at) {
      odeint::integrate_adaptive(stepper, rhs, x, at, target, std::min(0.01, target - at));
      at = target;
    }
    out.push_back(std::max(x[0], 0.0));
  }
  return out;
}

double reduced_theta(double order, double s) {
  const double grid[1] = {s};
  return integrate_reduced(order, 1.0, grid).front();
}

} // namespace

void DesorptionModel::validate() const {
  if (!(barrier_eV > 0.0)) throw InputError("desorption barrier must be positive");
  if (!(prefactor_per_s > 0.0)) throw InputError("attempt frequency must be positive");
  if (!(order > 0.0)) throw InputError("reaction order must be positive");
}

double rate_constant(const DesorptionModel& m, double T_K) {
  return evaluate_rate(m, T_K).rate;
}

RateSample evaluate_rate(const DesorptionModel& m, double T_K) {
  m.validate();
  require_temperature(T_K);
  const double rate =
      m.prefactor_per_s * std::exp(-m.barrier_eV / (constants::boltzmann_eV_per_K * T_K));
  RateSample out{T_K, rate, RangeFlag::Ok};
  if (rate < std::numeric_limits<double>::min()) {
    out.rate = 0.0;
    out.flag = RangeFlag::Underflow;
  }
  return out;
}

CoverageTrajectory coverage_trajectory(const DesorptionModel& m, double T_K, double theta0,
                                       std::span<const double> t_grid) {
  if (m.order != 1.0) return coverage_trajectory_numeric(m, T_K, theta0, t_grid);
  if (!(theta0 > 0.0 && theta0 <= 1.0)) throw InputError("theta0 must lie in (0, 1]");
  require_grid(t_grid);
  const double k = rate_constant(m, T_K);
  CoverageTrajectory out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back({t, theta0 * std::exp(-k * t)});
  return out;
}

CoverageTrajectory coverage_trajectory_numeric(const DesorptionModel& m, double T_K,
                                               double theta0, std::span<const double> t_grid) {
  if (!(theta0 > 0.0 && theta0 <= 1.0)) throw InputError("theta0 must lie in (0, 1]");
  require_grid(t_grid);
  const double k = rate_constant(m, T_K);
  // d theta/dt = -k theta^n. With theta = theta0 u and s = k theta0^(n-1) t
  // this becomes du/ds = -u^n, u(0) = 1.
  const double scale = k * std::pow(theta0, m.order - 1.0);
  std::vector<double> s(t_grid.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = scale * t_grid[i];
  const std::vector<double> u = integrate_reduced(m.order, 1.0, s);
  CoverageTrajectory out;
  out.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) out.push_back({t_grid[i], theta0 * u[i]});
  return out;
}

double time_to_fraction(const DesorptionModel& m, double T_K, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InputError("fraction remaining must lie in (0, 1)");
  }
  const RateSample r = evaluate_rate(m, T_K);
  if (r.flag == RangeFlag::Underflow) {
    throw NumericalError("desorption rate underflows; coverage never decays in double range");
  }
  if (m.order == 1.0) return -std::log(fraction) / r.rate;

  // Bracket in reduced time, then bisect.
  double lo = 0.0;
  double hi = 1.0;
  while (reduced_theta(m.order, hi) > fraction) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("coverage does not reach the requested fraction");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (reduced_theta(m.order, mid) > fraction ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / r.rate;
}

std::vector<RateSample> temperature_sweep(const DesorptionModel& m, double T_min_K,
                                          double T_max_K, int steps,
                                          std::span<const double> markers_K) {
  require_temperature(T_min_K);
  if (!(T_max_K >= T_min_K)) throw InputError("temperature range is reversed");
  std::vector<double> grid;
  if (T_max_K == T_min_K) {
    grid.push_back(T_min_K);
  } else {
    if (steps < 2) throw InputError("a temperature sweep needs at least 2 steps");
    for (int i = 0; i < steps; ++i) {
      grid.push_back(i == steps - 1 ? T_max_K
                                    : T_min_K + (T_max_K - T_min_K) * i / (steps - 1));
    }
    for (double marker : markers_K) {
      if (marker < T_min_K || marker > T_max_K) continue;
      const bool present = std::any_of(grid.begin(), grid.end(),
                                       [&](double t) { return std::abs(t - marker) < 1e-9; });
      if (!present) grid.push_back(marker);
    }
    std::sort(grid.begin(), grid.end());
  }
  std::vector<RateSample> out;
  out.reserve(grid.size());
  for (double T : grid) out.push_back(evaluate_rate(m, T));
  return out;
}

Depletion desorbed_after(const DesorptionModel& m, double T_K, double duration_s, double N0) {
  if (!(N0 > 0.0)) throw InputError("initial density must be positive");
  if (!(duration_s >= 0.0)) throw InputError("duration must be non-negative");
  const double t[1] = {duration_s};
  const double theta = coverage_trajectory(m, T_K, 1.0, t).front().theta;

  // Keep desorbed + remaining == N0 in floating point: whichever part is at
  // least N0/2 is obtained by an exact subtraction from N0.
  Depletion out;
  const double r = N0 * theta;
  if (r >= N0 / 2.0) {
    out.remaining = r;
    out.desorbed = N0 - r;
  } else {
    out.desorbed = N0 - r;
    out.remaining = N0 - out.desorbed;
  }
  if (theta < std::numeric_limits<double>::min() && duration_s > 0.0) {
    out.flag = RangeFlag::Underflow;
  }
  return out;
}

} // namespace surfspin::kinetics
