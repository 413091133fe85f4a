#pragma once

#include <cmath>
#include <vector>

#include "lamperti/sample_path.hpp"

namespace lamperti {

/// Lamperti transform X_t = t^H U_{log t}: a stationary path indexed by real
/// time becomes an H-self-similar path on the image grid {e^u}. The transform
/// is evaluated pointwise on the image grid (no resampling), so it is exact
/// and invertible; callers resample explicitly when they need another grid.
inline SamplePath to_selfsimilar(const SamplePath& u, Hurst h) {
  const auto& src = u.grid.points();
  std::vector<double> times(src.size());
  std::vector<double> vals(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    times[i] = std::exp(src[i]);
    vals[i] = std::exp(h.value * src[i]) * u.values[i];
  }
  return SamplePath(TimeGrid::from_points(std::move(times)), std::move(vals));
}

/// Inverse Lamperti transform U_t = e^{-Ht} X_{e^t} on the image grid
/// {log m}; the path must live on positive times.
inline SamplePath to_stationary(const SamplePath& x, Hurst h) {
  const auto& src = x.grid.points();
  if (src.front() <= 0.0)
    throw std::domain_error("to_stationary: self-similar paths are indexed by t > 0");
  std::vector<double> times(src.size());
  std::vector<double> vals(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    times[i] = std::log(src[i]);
    vals[i] = std::exp(-h.value * times[i]) * x.values[i];
  }
  return SamplePath(TimeGrid::from_points(std::move(times)), std::move(vals));
}

/// Discrete Lamperti transform on the grid M = {e^n}: X_{e^n} = e^{Hn} U_n.
inline SamplePath to_selfsimilar(const DiscreteSeries& u, double hurst_exponent) {
  if (u.size() < 2) throw std::invalid_argument("to_selfsimilar: need at least 2 points");
  std::vector<double> times(u.size());
  std::vector<double> vals(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double n = static_cast<double>(u.start_index + static_cast<long>(i));
    times[i] = std::exp(n);
    vals[i] = std::exp(hurst_exponent * n) * u.values[i];
  }
  return SamplePath(TimeGrid::from_points(std::move(times)), std::move(vals));
}

/// Transform every path of an ensemble; the shared grid maps once.
inline Ensemble to_selfsimilar(const Ensemble& ens, Hurst h) {
  Ensemble out{to_selfsimilar(ens.path(0), h).grid, {}, ens.seed, ens.stream_ids};
  out.values.reserve(ens.n_paths());
  const auto& src = ens.grid.points();
  std::vector<double> weight(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) weight[i] = std::exp(h.value * src[i]);
  for (const auto& v : ens.values) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = weight[i] * v[i];
    out.values.push_back(std::move(w));
  }
  return out;
}

inline Ensemble to_stationary(const Ensemble& ens, Hurst h) {
  Ensemble out{to_stationary(ens.path(0), h).grid, {}, ens.seed, ens.stream_ids};
  out.values.reserve(ens.n_paths());
  const auto& dst = out.grid.points();
  std::vector<double> weight(dst.size());
  for (std::size_t i = 0; i < dst.size(); ++i) weight[i] = std::exp(-h.value * dst[i]);
  for (const auto& v : ens.values) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = weight[i] * v[i];
    out.values.push_back(std::move(w));
  }
  return out;
}

}  // namespace lamperti
