#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lamperti/rng.hpp"
#include "lamperti/sample_path.hpp"

namespace lamperti {

/// ARMA(p, q) description: X_n = c + sum a_k X_{n-k} + xi_n + sum b_k xi_{n-k},
/// with Gaussian white noise xi of standard deviation noise_sd.
struct ArmaSpec {
  double constant = 0.0;
  std::vector<double> ar;
  std::vector<double> ma;
  double noise_sd = 1.0;
};

/// Stationarity check: all roots of 1 - sum a_k z^k outside the unit disk,
/// tested by Schur-Cohn reduction of the reversed polynomial (no root
/// finding needed).
inline bool is_stationary(const ArmaSpec& spec) {
  std::vector<double> a;
  a.reserve(spec.ar.size() + 1);
  a.push_back(1.0);
  for (double c : spec.ar) a.push_back(-c);
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
  while (a.size() > 1) {
    const double k = a.back() / a.front();
    if (!(std::abs(k) < 1.0)) return false;
    std::vector<double> b(a.size() - 1);
    for (std::size_t j = 0; j + 1 < a.size(); ++j) b[j] = a[j] - k * a[a.size() - 1 - j];
    a = std::move(b);
  }
  return true;
}

struct DiscreteStationaryResult {
  DiscreteSeries series;
  std::size_t truncation_depth = 0;
  double tail_bound = 0.0;  // e^{-rate (K+1)} * max |partial sum|
};

/// Truncated stationary representation U_n = sum_{j=0..K} e^{-rate j} dG_{n-j}
/// from an increment series with enough negative-index history.
inline DiscreteStationaryResult discrete_stationary_solution(const DiscreteSeries& increments,
                                                             double rate, std::size_t depth) {
  if (!(rate > 0.0)) throw std::invalid_argument("discrete_stationary_solution: rate must be > 0");
  if (increments.size() < depth + 1)
    throw std::invalid_argument("discrete_stationary_solution: history shorter than depth K");
  std::vector<double> w(depth + 1);
  for (std::size_t j = 0; j <= depth; ++j) w[j] = std::exp(-rate * static_cast<double>(j));

  const std::size_t n_out = increments.size() - depth;
  std::vector<double> u(n_out);
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n_out; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= depth; ++j) s += w[j] * increments.values[i + depth - j];
    u[i] = s;
    max_abs = std::max(max_abs, std::abs(s));
  }
  DiscreteStationaryResult out{
      DiscreteSeries(increments.start_index + static_cast<long>(depth), std::move(u)), depth,
      std::exp(-rate * static_cast<double>(depth + 1)) * max_abs};
  return out;
}

/// AR(1) difference-equation residual
///   max_n |U_n - U_{n-1} - (e^{-rate} - 1) U_{n-1} - dG_n|.
/// Evaluated as |(U_n - e^{-rate} U_{n-1}) - dG_n|, the same expression the
/// extractor uses, so extracted noise gives exactly zero.
inline double ar1_residual(const DiscreteSeries& u, const DiscreteSeries& increments,
                           double rate) {
  if (u.size() < 2) throw std::invalid_argument("ar1_residual: series too short");
  if (increments.first_index() > u.first_index() + 1 || increments.last_index() < u.last_index())
    throw std::invalid_argument("ar1_residual: increment indices do not cover the series");
  const double phi = std::exp(-rate);
  double worst = 0.0;
  for (long n = u.first_index() + 1; n <= u.last_index(); ++n) {
    const double r = (u.at(n) - phi * u.at(n - 1)) - increments.at(n);
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// The unique AR(1) noise increments dG_n = U_n - e^{-rate} U_{n-1} behind a
/// stationary series.
inline DiscreteSeries extract_discrete_noise(const DiscreteSeries& u, double rate) {
  if (u.size() < 2) throw std::invalid_argument("extract_discrete_noise: need >= 2 points");
  const double phi = std::exp(-rate);
  std::vector<double> dg(u.size() - 1);
  for (std::size_t i = 1; i < u.size(); ++i) dg[i - 1] = u.values[i] - phi * u.values[i - 1];
  return DiscreteSeries(u.start_index + 1, std::move(dg));
}

/// Simulate a stationary ARMA(p, q) series of length n after burn_in steps,
/// starting from zeros.
inline DiscreteSeries sample_arma(const ArmaSpec& spec, std::size_t n, std::size_t burn_in,
                                  RngStream& rng, long start_index = 0) {
  if (n == 0) throw std::invalid_argument("simulate_arma: n == 0");
  if (!(spec.noise_sd > 0.0)) throw std::invalid_argument("simulate_arma: noise_sd must be > 0");
  if (!is_stationary(spec))
    throw std::invalid_argument("simulate_arma: AR polynomial is not stationary");
  const std::size_t p = spec.ar.size();
  const std::size_t q = spec.ma.size();

  const std::size_t total = burn_in + n;
  std::vector<double> x(total + p, 0.0);  // p zero pre-samples
  std::vector<double> xi(total + q, 0.0);
  for (std::size_t i = q; i < xi.size(); ++i) xi[i] = spec.noise_sd * rng.gaussian();
  for (std::size_t i = 0; i < total; ++i) {
    double v = spec.constant + xi[i + q];
    for (std::size_t k = 0; k < p; ++k) v += spec.ar[k] * x[i + p - 1 - k];
    for (std::size_t k = 0; k < q; ++k) v += spec.ma[k] * xi[i + q - 1 - k];
    x[i + p] = v;
  }
  return DiscreteSeries(start_index,
                        std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(p + burn_in),
                                            x.end()));
}

/// Deterministic under the seed.
inline DiscreteSeries simulate_arma(const ArmaSpec& spec, std::size_t n, std::size_t burn_in,
                                    std::uint64_t seed, long start_index = 0) {
  RngStream rng(seed);
  return sample_arma(spec, n, burn_in, rng, start_index);
}

/// Truncated moving-average realization X_n = sum_j b_j xi_{n-j} with the
/// deterministic component set to zero.
inline DiscreteSeries sample_ma_truncated(const std::vector<double>& coeffs, std::size_t n,
                                          RngStream& rng, long start_index = 0) {
  if (coeffs.empty()) throw std::invalid_argument("simulate_ma_truncated: empty coefficients");
  if (n == 0) throw std::invalid_argument("simulate_ma_truncated: n == 0");
  const std::size_t J = coeffs.size();
  std::vector<double> xi(n + J - 1);
  for (auto& v : xi) v = rng.gaussian();
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < J; ++j) v += coeffs[j] * xi[i + J - 1 - j];
    x[i] = v;
  }
  return DiscreteSeries(start_index, std::move(x));
}

inline DiscreteSeries simulate_ma_truncated(const std::vector<double>& coeffs, std::size_t n,
                                            std::uint64_t seed, long start_index = 0) {
  RngStream rng(seed);
  return sample_ma_truncated(coeffs, n, rng, start_index);
}

}  // namespace lamperti
