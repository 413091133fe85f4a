#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "lamperti/sample_path.hpp"

namespace lamperti {

namespace detail {

/// Compensated accumulator; keeps long trapezoid sums near working precision.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

/// Trapezoid rule for int_s^t X_u e^{rate u} du on the grid points between
/// s and t, with linear interpolation of X at off-grid endpoints. Requires
/// s <= t, both inside the grid span.
inline double weighted_trapezoid(const SamplePath& x, double rate, double s, double t) {
  const auto& grid = x.grid;
  auto f = [&](std::size_t i) { return x.values[i] * std::exp(rate * grid[i]); };
  auto f_at = [&](double u) { return x.value_at(u) * std::exp(rate * u); };

  if (s == t) return 0.0;
  const std::size_t cs = grid.cell_of(s);
  const std::size_t ct = grid.cell_of(t);
  if (cs == ct) return 0.5 * (t - s) * (f_at(s) + f_at(t));

  KahanSum acc;
  // partial head cell [s, cs+1], full interior cells, partial tail [ct, t]
  const double head_t = grid[cs + 1];
  if (head_t > s) acc.add(0.5 * (head_t - s) * (f_at(s) + f(cs + 1)));
  double prev = f(cs + 1);
  for (std::size_t i = cs + 1; i < ct; ++i) {
    const double next = f(i + 1);
    acc.add(0.5 * (grid[i + 1] - grid[i]) * (prev + next));
    prev = next;
  }
  if (t > grid[ct]) acc.add(0.5 * (t - grid[ct]) * (f(ct) + f_at(t)));
  return acc.sum;
}

}  // namespace detail

/// Pathwise integral int_s^t e^{rate u} dX_u via integration by parts:
///   e^{rate t} X_t - e^{rate s} X_s - rate * int_s^t X_u e^{rate u} du,
/// the correction integral evaluated with the trapezoid rule. For t < s the
/// value is the negation of the (s, t) integral. rate = 0 reduces exactly to
/// X_t - X_s.
inline double exp_weighted_integral(const SamplePath& x, double rate, double s, double t) {
  if (!std::isfinite(rate)) throw std::invalid_argument("exp_weighted_integral: bad rate");
  if (!x.grid.contains(s) || !x.grid.contains(t))
    throw std::out_of_range("exp_weighted_integral: endpoint outside grid span");
  if (t < s) return -exp_weighted_integral(x, rate, t, s);
  const double boundary =
      std::exp(rate * t) * x.value_at(t) - std::exp(rate * s) * x.value_at(s);
  if (rate == 0.0) return boundary;
  return boundary - rate * detail::weighted_trapezoid(x, rate, s, t);
}

/// Running values of int_{t_0}^{t_k} e^{rate u} dX_u at every grid point,
/// accumulated cell by cell with the same trapezoid correction.
inline std::vector<double> exp_weighted_cumulative(const SamplePath& x, double rate) {
  const auto& g = x.grid;
  std::vector<double> out(x.size(), 0.0);
  detail::KahanSum acc;
  double wprev = x.values[0] * std::exp(rate * g[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double wi = x.values[i] * std::exp(rate * g[i]);
    double cell = std::exp(rate * g[i]) * x.values[i] - std::exp(rate * g[i - 1]) * x.values[i - 1];
    cell -= rate * 0.5 * (g[i] - g[i - 1]) * (wprev + wi);
    acc.add(cell);
    out[i] = acc.sum;
    wprev = wi;
  }
  return out;
}

struct ImproperIntegral {
  double value = 0.0;
  bool converged = false;
  double horizon_used = 0.0;  // truncation depth T: integral taken over [t-T, t]
  double last_delta = 0.0;    // change produced by the final horizon doubling
  std::size_t evaluations = 0;
};

/// Truncated evaluation of int_{-infty}^t e^{rate u} dX_u, defined as
///   e^{rate t} X_t - rate * int_{-infty}^t e^{rate u} X_u du.
/// The Riemann integral is truncated at horizon T, and T doubles (up to the
/// available history) until a doubling moves the value by less than tol.
/// Exhausting the history without meeting tol is reported as converged=false,
/// not an error: divergence is an observable outcome here.
inline ImproperIntegral improper_exp_integral(const SamplePath& x, double rate, double t,
                                              double tol) {
  if (!(rate > 0.0)) throw std::invalid_argument("improper_exp_integral: rate must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("improper_exp_integral: tol must be > 0");
  if (!x.grid.contains(t)) throw std::out_of_range("improper_exp_integral: t outside grid span");
  const double avail = t - x.grid.front();
  if (!(avail > 0.0)) throw std::out_of_range("improper_exp_integral: no history below t");

  const double boundary = std::exp(rate * t) * x.value_at(t);
  auto value_at_horizon = [&](double T) {
    return boundary - rate * detail::weighted_trapezoid(x, rate, t - T, t);
  };

  ImproperIntegral out;
  double T = std::min(1.0, 0.25 * avail);
  double prev = value_at_horizon(T);
  out.evaluations = 1;
  while (true) {
    double next_T = 2.0 * T;
    bool last = false;
    if (next_T >= avail) {
      next_T = avail;
      last = true;
    }
    const double cur = value_at_horizon(next_T);
    ++out.evaluations;
    out.last_delta = std::abs(cur - prev);
    out.value = cur;
    out.horizon_used = next_T;
    if (out.last_delta < tol) {
      out.converged = true;
      return out;
    }
    if (last) return out;  // history exhausted, converged == false
    T = next_T;
    prev = cur;
  }
}

/// Linear resampling of a path onto a new grid contained in its span.
inline SamplePath resample(const SamplePath& x, const TimeGrid& new_grid) {
  if (new_grid.front() < x.grid.front() - 1e-12 * std::max(1.0, std::abs(x.grid.front())) ||
      new_grid.back() > x.grid.back() + 1e-12 * std::max(1.0, std::abs(x.grid.back())))
    throw std::out_of_range("resample: new grid extends outside the path span");
  std::vector<double> vals(new_grid.size());
  for (std::size_t i = 0; i < new_grid.size(); ++i) vals[i] = x.value_at(new_grid[i]);
  return SamplePath(new_grid, std::move(vals));
}

}  // namespace lamperti
