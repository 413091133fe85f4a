#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "lamperti/integrate.hpp"
#include "lamperti/sample_path.hpp"
#include "lamperti/stats.hpp"

namespace lamperti {

/// Solution of dU_t = -rate U_t dt + dG_t on the noise grid.
///
/// The per-step residual U_{k+1} - U_k + rate * (dt/2)(U_k + U_{k+1}) - dG_k
/// is O(dt^2), see langevin_residual.
struct LangevinSolution {
  SamplePath path;
  double rate = 0.0;
  double initial = 0.0;        // U at the grid's zero point
  bool stationary = false;     // true when built by stationary_solution
  bool converged = true;       // truncation diagnostics (stationary only)
  double burn_in_used = 0.0;
  double initial_delta = 0.0;  // last horizon doubling's change in U_0
  std::string noise_ref;
};

namespace detail {

inline std::size_t zero_anchor(const SamplePath& g, const char* who) {
  const auto z = g.grid.zero_index();
  if (!z) throw std::invalid_argument(std::string(who) + ": grid must contain t = 0");
  return *z;
}

/// Noise convention G_0 = 0, allowing rounding-level residue from grid
/// arithmetic (the dynamics see only increments).
inline void check_noise_zero(const SamplePath& g, std::size_t z, const char* who) {
  double scale = 1.0;
  for (double v : g.values) scale = std::max(scale, std::abs(v));
  if (std::abs(g.values[z]) > 1e-12 * scale)
    throw std::invalid_argument(std::string(who) + ": noise must satisfy G_0 = 0");
}

inline void check_rate_step(const SamplePath& p, double rate, const char* who) {
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument(std::string(who) + ": rate must be positive and finite");
  double max_dt = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) max_dt = std::max(max_dt, p.grid[i] - p.grid[i - 1]);
  if (rate * max_dt >= 2.0)
    throw std::invalid_argument(std::string(who) + ": grid too coarse for this rate");
}

}  // namespace detail

/// Unique pathwise solution U_t = e^{-rate t}(U_0 + int_0^t e^{rate s} dG_s)
/// of the Langevin equation, integrated cell by cell outward from t = 0.
/// The one-step update
///   U_{k+1} = e^{-rate dt} U_k + (1 - rate dt / 2) dG_k
/// uses only the noise increment of each cell, so solutions restart exactly
/// (flow property) and extract_noise inverts it exactly.
inline LangevinSolution solve_forward(const SamplePath& noise, double rate, double initial_value,
                                      std::string noise_ref = {}) {
  detail::check_rate_step(noise, rate, "solve_forward");
  const std::size_t z = detail::zero_anchor(noise, "solve_forward");
  detail::check_noise_zero(noise, z, "solve_forward");
  if (!std::isfinite(initial_value))
    throw std::invalid_argument("solve_forward: non-finite initial value");

  const auto& g = noise.grid;
  std::vector<double> u(noise.size());
  u[z] = initial_value;
  for (std::size_t k = z; k + 1 < noise.size(); ++k) {
    const double dt = g[k + 1] - g[k];
    const double dg = noise.values[k + 1] - noise.values[k];
    u[k + 1] = std::exp(-rate * dt) * u[k] + (1.0 - 0.5 * rate * dt) * dg;
  }
  for (std::size_t k = z; k > 0; --k) {
    const double dt = g[k] - g[k - 1];
    const double dg = noise.values[k] - noise.values[k - 1];
    u[k - 1] = (u[k] - (1.0 - 0.5 * rate * dt) * dg) / std::exp(-rate * dt);
  }

  LangevinSolution sol{SamplePath(g, std::move(u)), rate, initial_value, false, true,
                       0.0, 0.0, std::move(noise_ref)};
  return sol;
}

/// The unique noise G with G_0 = 0 whose Langevin solution is U: inverts the
/// solve_forward update per cell,
///   dG_k = (U_{k+1} - e^{-rate dt} U_k) / (1 - rate dt / 2),
/// so solve_forward(extract_noise(U), rate, U_0) reproduces U to rounding.
inline SamplePath extract_noise(const SamplePath& u, double rate) {
  detail::check_rate_step(u, rate, "extract_noise");
  const std::size_t z = detail::zero_anchor(u, "extract_noise");
  const auto& g = u.grid;
  std::vector<double> gvals(u.size());
  gvals[z] = 0.0;
  for (std::size_t k = z; k + 1 < u.size(); ++k) {
    const double dt = g[k + 1] - g[k];
    const double dg =
        (u.values[k + 1] - std::exp(-rate * dt) * u.values[k]) / (1.0 - 0.5 * rate * dt);
    gvals[k + 1] = gvals[k] + dg;
  }
  for (std::size_t k = z; k > 0; --k) {
    const double dt = g[k] - g[k - 1];
    const double dg =
        (u.values[k] - std::exp(-rate * dt) * u.values[k - 1]) / (1.0 - 0.5 * rate * dt);
    gvals[k - 1] = gvals[k] - dg;
  }
  return SamplePath(g, std::move(gvals));
}

/// Stationary solution U_t = e^{-rate t} int_{-infty}^t e^{rate s} dG_s,
/// built by evaluating the initial condition U_0 with the truncated improper
/// integral over the noise's negative-time history, then solving forward on
/// [0, end]. A non-converged truncation is flagged, not thrown; the
/// counterexample workflow needs to observe divergence.
inline LangevinSolution stationary_solution(const SamplePath& noise, double rate, double tol,
                                            std::string noise_ref = {}) {
  const std::size_t z = detail::zero_anchor(noise, "stationary_solution");
  detail::check_noise_zero(noise, z, "stationary_solution");
  if (z == 0) throw std::invalid_argument("stationary_solution: noise has no negative history");
  if (z + 1 == noise.size())
    throw std::invalid_argument("stationary_solution: noise ends at t = 0");

  const auto imp = improper_exp_integral(noise, rate, 0.0, tol);
  auto forward = slice(noise, z, noise.size() - 1);
  LangevinSolution sol = solve_forward(forward, rate, imp.value, std::move(noise_ref));
  sol.stationary = true;
  sol.converged = imp.converged;
  sol.burn_in_used = imp.horizon_used;
  sol.initial_delta = imp.last_delta;
  return sol;
}

/// Max per-cell residual of the integrated Langevin equation,
///   |U_{k+1} - U_k + rate * (dt/2)(U_k + U_{k+1}) - dG_k|,
/// the trapezoid form of dU = -rate U dt + dG. O(dt^2) per step for any
/// solution produced by solve_forward.
inline double langevin_residual(const SamplePath& u, const SamplePath& noise, double rate) {
  if (!u.grid.same_points(noise.grid))
    throw std::invalid_argument("langevin_residual: U and G must share one grid");
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double dt = u.grid[k + 1] - u.grid[k];
    const double r = u.values[k + 1] - u.values[k] +
                     rate * 0.5 * dt * (u.values[k] + u.values[k + 1]) -
                     (noise.values[k + 1] - noise.values[k]);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// Existence gate for stationary solutions: the Langevin equation driven by
/// G has one exactly when G is an admissible noise. Combines the membership
/// check (truncated-integral convergence and tail decay) with a two-window
/// KS test on the history's increments.
inline TestReport verify_gh_noise(const SamplePath& noise, double rate, double tol) {
  const std::size_t z = detail::zero_anchor(noise, "verify_gh_noise");
  detail::check_noise_zero(noise, z, "verify_gh_noise");
  const TestReport membership = test_gh_membership(noise, rate, tol);

  // increment stationarity across the two halves of the history window
  const std::size_t half = z / 2;
  if (half < 2) throw std::invalid_argument("verify_gh_noise: history too short");
  std::vector<double> early, late;
  early.reserve(half);
  late.reserve(z - half);
  for (std::size_t i = 0; i < z; ++i) {
    const double d = noise.values[i + 1] - noise.values[i];
    (i < half ? early : late).push_back(d);
  }
  const TestReport incr = ks_two_sample(early, late, 0.01);

  TestReport r;
  r.name = "verify_gh_noise";
  r.statistic = std::max(membership.statistic / membership.threshold,
                         incr.statistic / incr.threshold);
  r.threshold = 1.0;
  r.pass = membership.pass && incr.pass;
  r.n_samples = {early.size(), late.size()};
  std::ostringstream os;
  os << "membership{" << membership.details << "} increments{" << incr.details << "}";
  r.details = os.str();
  return r;
}

}  // namespace lamperti
