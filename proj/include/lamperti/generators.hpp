#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lamperti/gaussian.hpp"
#include "lamperti/integrate.hpp"
#include "lamperti/langevin.hpp"
#include "lamperti/rng.hpp"
#include "lamperti/sample_path.hpp"

namespace lamperti {

// ---------------------------------------------------------------------------
// Brownian motion

/// Independent Gaussian increments with Var(W_t - W_s) = t - s, anchored to
/// zero at the grid's time-zero point (or at the first point when the grid
/// does not contain 0).
inline std::vector<double> sample_brownian(const TimeGrid& grid, RngStream& rng) {
  std::vector<double> v(grid.size());
  v[0] = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    v[i] = v[i - 1] + std::sqrt(grid[i] - grid[i - 1]) * rng.gaussian();
  if (const auto z = grid.zero_index()) {
    const double shift = v[*z];
    for (auto& x : v) x -= shift;
    v[*z] = 0.0;
  }
  return v;
}

inline SamplePath brownian(const TimeGrid& grid, std::uint64_t seed, std::uint64_t stream = 0) {
  RngStream rng(seed, stream);
  return SamplePath(grid, sample_brownian(grid, rng));
}

inline Ensemble brownian_ensemble(const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                                  unsigned threads = 1) {
  return generate_ensemble(
      grid, n_paths, seed, [](const TimeGrid& g, RngStream& rng) { return sample_brownian(g, rng); },
      threads);
}

// ---------------------------------------------------------------------------
// Fractional Brownian motion

struct FbmSpec {
  Hurst hurst;
  TimeGrid grid;
  FbmSpec(Hurst h, TimeGrid g) : hurst(h), grid(std::move(g)) {
    if (!(h.value < 1.0)) throw std::invalid_argument("FbmSpec: H must lie in (0,1)");
  }
};

/// Two-sided fBm covariance (|s|^{2H} + |t|^{2H} - |t-s|^{2H}) / 2; for
/// s, t >= 0 this is the usual fBm kernel.
inline double fbm_covariance(double hurst, double s, double t) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(s), h2) + std::pow(std::abs(t), h2) -
                std::pow(std::abs(t - s), h2));
}

/// Standard fGn autocovariance at integer lag, unit step.
inline double fgn_autocovariance(double hurst, std::size_t lag) {
  const double h2 = 2.0 * hurst;
  const double k = static_cast<double>(lag);
  if (lag == 0) return 1.0;
  return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) + std::pow(k - 1.0, h2));
}

/// fBm sampler: on uniform grids that touch t = 0 the increments are
/// stationary fGn, synthesized by circulant embedding (exact in law,
/// O(n log n)) and cumulated; any other grid gets a dense Cholesky of the
/// covariance, which limits the usable size.
class FbmSampler {
 public:
  explicit FbmSampler(FbmSpec spec) : spec_(std::move(spec)) {
    const auto& grid = spec_.grid;
    zero_ = grid.zero_index();
    if (grid.kind() == GridKind::uniform && zero_) {
      const double dt = grid.step();
      const double scale = std::pow(dt, 2.0 * spec_.hurst.value);
      const double h = spec_.hurst.value;
      increments_ = std::make_shared<detail::StationaryGaussianSampler>(
          [h, scale](std::size_t k) { return scale * fgn_autocovariance(h, k); },
          grid.size() - 1);
      return;
    }
    // dense route over the non-zero grid points
    std::vector<double> times;
    times.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!zero_ || i != *zero_) times.push_back(grid[i]);
    const double h = spec_.hurst.value;
    dense_ = std::make_shared<detail::GaussianVectorSampler>(
        [h, times](std::size_t i, std::size_t j) {
          return fbm_covariance(h, times[i], times[j]);
        },
        times.size());
  }

  const FbmSpec& spec() const { return spec_; }
  bool circulant() const { return increments_ && increments_->circulant(); }

  std::vector<double> sample(RngStream& rng) const {
    const auto& grid = spec_.grid;
    if (increments_) {
      const auto inc = increments_->sample(rng);
      std::vector<double> v(grid.size());
      v[0] = 0.0;
      for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i - 1] + inc[i - 1];
      const double shift = v[*zero_];
      for (auto& x : v) x -= shift;
      v[*zero_] = 0.0;
      return v;
    }
    const auto raw = dense_->sample(rng);
    std::vector<double> v(grid.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = (zero_ && i == *zero_) ? 0.0 : raw[k++];
    return v;
  }

 private:
  FbmSpec spec_;
  std::optional<std::size_t> zero_;
  std::shared_ptr<detail::StationaryGaussianSampler> increments_;
  std::shared_ptr<detail::GaussianVectorSampler> dense_;
};

inline SamplePath fbm(const FbmSpec& spec, std::uint64_t seed, std::uint64_t stream = 0) {
  FbmSampler sampler(spec);
  RngStream rng(seed, stream);
  return SamplePath(spec.grid, sampler.sample(rng));
}

inline Ensemble fbm_ensemble(const FbmSpec& spec, std::size_t n_paths, std::uint64_t seed,
                             unsigned threads = 1) {
  FbmSampler sampler(spec);
  return generate_ensemble(
      spec.grid, n_paths, seed,
      [&sampler](const TimeGrid&, RngStream& rng) { return sampler.sample(rng); }, threads);
}

// ---------------------------------------------------------------------------
// Lamperti transform of Brownian motion and its Langevin noise

/// The stationary Lamperti transform of Brownian motion,
/// U_t = (2 theta)^{-1/2} e^{-theta t} W_{e^{2 theta t}}, built pathwise
/// from one Brownian realization on the time-changed grid {e^{2 theta u}}.
inline SamplePath sample_lamperti_bm(double theta, const TimeGrid& grid, RngStream& rng) {
  if (!(theta > 0.0)) throw std::invalid_argument("sample_lamperti_bm: theta must be > 0");
  std::vector<double> tau(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) tau[i] = std::exp(2.0 * theta * grid[i]);
  const auto w = sample_brownian(TimeGrid::from_points(std::move(tau)), rng);
  const double c = 1.0 / std::sqrt(2.0 * theta);
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) u[i] = c * std::exp(-theta * grid[i]) * w[i];
  return SamplePath(grid, std::move(u));
}

/// Langevin noise of the Lamperti transform of Brownian motion,
/// G_t = (2 theta)^{-1/2} int_0^t e^{-theta u} dW_{e^{2 theta u}}: the unique
/// noise whose solution is the transformed path, so it is extracted from one
/// pathwise realization. Increments match Brownian increments in law.
inline SamplePath sample_bm_lamperti_noise(double theta, const TimeGrid& grid, RngStream& rng) {
  if (!grid.zero_index())
    throw std::invalid_argument("bm_lamperti_noise: grid must contain t = 0");
  return extract_noise(sample_lamperti_bm(theta, grid, rng), theta);
}

inline SamplePath bm_lamperti_noise(double theta, const TimeGrid& grid, std::uint64_t seed,
                                    std::uint64_t stream = 0) {
  RngStream rng(seed, stream);
  return sample_bm_lamperti_noise(theta, grid, rng);
}

// ---------------------------------------------------------------------------
// Inverse Lamperti transform of fBm (stationary), and the Kaarakka-Salminen
// time change

/// Autocovariance of V_t = e^{-Ht} B^H_{e^t}: cosh(H tau) - e^{-H tau}
/// (e^tau - 1)^{2H} / 2, evaluated in a cancellation-free form.
inline double inverse_lamperti_fbm_autocovariance(double hurst, double tau) {
  tau = std::abs(tau);
  if (tau == 0.0) return 1.0;
  const double bracket = -std::expm1(2.0 * hurst * std::log1p(-std::exp(-tau)));
  const double second = bracket > 0.0 ? 0.5 * std::exp(hurst * tau + std::log(bracket)) : 0.0;
  return 0.5 * std::exp(-hurst * tau) + second;
}

/// Sampler for the stationary process V = (inverse Lamperti of B^H) on a
/// uniform grid, drawn directly from its autocovariance.
class InverseLampertiFbmSampler {
 public:
  InverseLampertiFbmSampler(Hurst h, const TimeGrid& grid) : hurst_(h.value), grid_(grid) {
    if (!(h.value < 1.0))
      throw std::invalid_argument("InverseLampertiFbmSampler: H must lie in (0,1)");
    if (grid.kind() != GridKind::uniform)
      throw std::invalid_argument("InverseLampertiFbmSampler: grid must be uniform");
    const double du = grid.step();
    const double hv = hurst_;
    core_ = std::make_shared<detail::StationaryGaussianSampler>(
        [hv, du](std::size_t k) {
          return inverse_lamperti_fbm_autocovariance(hv, du * static_cast<double>(k));
        },
        grid.size());
  }

  const TimeGrid& grid() const { return grid_; }

  std::vector<double> sample(RngStream& rng) const { return core_->sample(rng); }

 private:
  double hurst_;
  TimeGrid grid_;
  std::shared_ptr<detail::StationaryGaussianSampler> core_;
};

inline SamplePath inverse_lamperti_fbm(Hurst h, const TimeGrid& grid, std::uint64_t seed,
                                       std::uint64_t stream = 0) {
  InverseLampertiFbmSampler sampler(h, grid);
  RngStream rng(seed, stream);
  return SamplePath(grid, sampler.sample(rng));
}

/// Time-changed fBm X_t = e^{-alpha t} B^H_{a_t} with a_t = (H/alpha)
/// e^{(alpha/H) t}, the exponent that keeps Var(X_t) constant. alpha = H is
/// exactly the inverse Lamperti transform of B^H. Sampled through the
/// identity X_t = (H/alpha)^H V_{(alpha/H) t + const}.
inline SamplePath time_changed_fbm(Hurst h, double alpha, const TimeGrid& grid,
                                   std::uint64_t seed, std::uint64_t stream = 0) {
  if (!(alpha > 0.0)) throw std::invalid_argument("time_changed_fbm: alpha must be > 0");
  if (grid.kind() != GridKind::uniform)
    throw std::invalid_argument("time_changed_fbm: grid must be uniform");
  const double ratio = alpha / h.value;
  const TimeGrid ugrid = TimeGrid::uniform_points(ratio * grid.front(), ratio * grid.step(),
                                                  grid.size());
  const SamplePath v = inverse_lamperti_fbm(h, ugrid, seed, stream);
  const double scale = std::pow(h.value / alpha, h.value);
  std::vector<double> x(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) x[i] = scale * v.values[i];
  return SamplePath(grid, std::move(x));
}

// ---------------------------------------------------------------------------
// Fractional Ornstein-Uhlenbeck processes

namespace detail {

/// Burn-in grid [-T, back] with the output step, T >= horizon rounded so
/// t = 0 falls exactly on a grid point.
inline TimeGrid burn_in_grid(const TimeGrid& out_grid, double horizon) {
  const double dt = out_grid.step();
  const auto m = static_cast<std::size_t>(std::ceil(horizon / dt));
  const double T = static_cast<double>(m) * dt;
  return TimeGrid::uniform_points(-T, dt, m + out_grid.size());
}

inline void check_fou_grid(const TimeGrid& out_grid, const char* who) {
  if (out_grid.kind() != GridKind::uniform)
    throw std::invalid_argument(std::string(who) + ": output grid must be uniform");
  if (std::abs(out_grid.front()) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": output grid must start at t = 0");
}

}  // namespace detail

/// Stationary fractional Ornstein-Uhlenbeck process of the first kind:
/// the Langevin equation driven by fBm, solved from a burn-in history of
/// 40 / theta so the truncated initial condition is converged.
namespace detail {

template <typename NoiseFn>
Ensemble fou_ensemble(const TimeGrid& out_grid, const TimeGrid& full, double theta,
                      std::size_t n_paths, std::uint64_t seed, unsigned threads, double tol,
                      NoiseFn&& make_noise) {
  if (n_paths == 0) throw std::invalid_argument("fou ensemble: need at least one path");
  Ensemble ens{out_grid, std::vector<std::vector<double>>(n_paths), seed, {}};
  ens.stream_ids.resize(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) ens.stream_ids[i] = i;
  parallel_for(n_paths, threads, [&](std::size_t i) {
    RngStream rng(seed, ens.stream_ids[i]);
    const SamplePath noise = make_noise(full, rng);
    ens.values[i] = stationary_solution(noise, theta, tol).path.values;
    if (ens.values[i].size() != out_grid.size())
      throw std::logic_error("fou ensemble: burn-in grid does not extend the output grid");
  });
  return ens;
}

}  // namespace detail

inline Ensemble fou_first_kind(Hurst h, double theta, const TimeGrid& out_grid,
                               std::size_t n_paths, std::uint64_t seed, unsigned threads = 1,
                               double tol = 1e-6) {
  detail::check_fou_grid(out_grid, "fou_first_kind");
  if (!(theta > 0.0)) throw std::invalid_argument("fou_first_kind: theta must be > 0");
  const TimeGrid full = detail::burn_in_grid(out_grid, 40.0 / theta);
  FbmSampler noise(FbmSpec(h, full));
  return detail::fou_ensemble(out_grid, full, theta, n_paths, seed, threads, tol,
                              [&noise](const TimeGrid& g, RngStream& rng) {
                                return SamplePath(g, noise.sample(rng));
                              });
}

/// Driving noise of the second-kind process: Y_t = int_0^t e^{-s} dB^H_{a_s}
/// with a_s = H e^{s/H}, built pathwise from one draw of the stationary
/// process V (B^H_{a_s} = H^H e^s V_{s/H + log H}).
inline SamplePath sample_fou2_noise(Hurst h, const TimeGrid& grid, RngStream& rng) {
  const auto z = grid.zero_index();
  if (!z) throw std::invalid_argument("sample_fou2_noise: grid must contain t = 0");
  if (grid.kind() != GridKind::uniform)
    throw std::invalid_argument("sample_fou2_noise: grid must be uniform");
  const double hv = h.value;
  InverseLampertiFbmSampler vs(h, TimeGrid::uniform_points(0.0, grid.step() / hv, grid.size()));
  const auto v = vs.sample(rng);
  const double scale = std::pow(hv, hv);
  std::vector<double> m(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) m[i] = scale * std::exp(grid[i]) * v[i];
  const SamplePath mpath(grid, std::move(m));
  auto y = exp_weighted_cumulative(mpath, -1.0);
  const double shift = y[*z];
  for (auto& x : y) x -= shift;
  y[*z] = 0.0;
  return SamplePath(grid, std::move(y));
}

/// Stationary fractional Ornstein-Uhlenbeck process of the second kind:
/// the Langevin equation with rate theta driven by Y^{(1,H)}.
inline Ensemble fou_second_kind(Hurst h, double theta, const TimeGrid& out_grid,
                                std::size_t n_paths, std::uint64_t seed, unsigned threads = 1,
                                double tol = 1e-6) {
  detail::check_fou_grid(out_grid, "fou_second_kind");
  if (!(theta > 0.0)) throw std::invalid_argument("fou_second_kind: theta must be > 0");
  const TimeGrid full = detail::burn_in_grid(out_grid, 40.0 / theta);
  // one shared sampler for the stationary core keeps the FFT plan warm
  InverseLampertiFbmSampler vs(h, TimeGrid::uniform_points(0.0, full.step() / h.value,
                                                           full.size()));
  const double scale = std::pow(h.value, h.value);
  const std::size_t z = full.index_of(0.0);
  return detail::fou_ensemble(out_grid, full, theta, n_paths, seed, threads, tol,
                              [&](const TimeGrid& g, RngStream& rng) {
                                const auto v = vs.sample(rng);
                                std::vector<double> m(g.size());
                                for (std::size_t i = 0; i < g.size(); ++i)
                                  m[i] = scale * std::exp(g[i]) * v[i];
                                auto y = exp_weighted_cumulative(SamplePath(g, std::move(m)), -1.0);
                                const double shift = y[z];
                                for (auto& x : y) x -= shift;
                                y[z] = 0.0;
                                return SamplePath(g, std::move(y));
                              });
}

// ---------------------------------------------------------------------------
// Pareto counterexample

/// Stationary-increment process that is not an admissible Langevin noise for
/// any rate: increments Z_k = e^{xi_k} with xi_k Pareto(alpha), alpha in (0,1).
struct ParetoSpec {
  double alpha;
  std::size_t n;  // history length per side of 0
  ParetoSpec(double a, std::size_t count) : alpha(a), n(count) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("ParetoSpec: alpha must be in (0,1)");
    if (count == 0) throw std::invalid_argument("ParetoSpec: n must be positive");
  }
};

/// Raw Pareto(alpha) draws via inverse CDF: xi = u^{-1/alpha}, u uniform(0,1].
inline std::vector<double> pareto_xi(double alpha, std::size_t n, RngStream& rng) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("pareto_xi: alpha in (0,1)");
  std::vector<double> xi(n);
  for (auto& x : xi) x = std::pow(1.0 - rng.uniform01(), -1.0 / alpha);
  return xi;
}

/// Exponent cap keeping increments e^{xi} and their partial sums inside
/// double range. Capping is irrelevant below exp(690) ~ 1e299 and the capped
/// tail is still far too heavy for any exponential weight to control.
inline constexpr double pareto_exponent_cap = 690.0;

/// Two-sided counterexample path on indices -n..n with G_0 = 0 and i.i.d.
/// increments Z = e^{min(xi, cap)}.
inline DiscreteSeries pareto_counterexample(const ParetoSpec& spec, std::uint64_t seed,
                                            std::uint64_t stream = 0) {
  RngStream rng(seed, stream);
  const auto xi = pareto_xi(spec.alpha, 2 * spec.n, rng);
  std::vector<double> g(2 * spec.n + 1, 0.0);
  const std::size_t z = spec.n;  // index of n = 0
  for (std::size_t i = z; i + 1 < g.size(); ++i)
    g[i + 1] = g[i] + std::exp(std::min(xi[i], pareto_exponent_cap));
  for (std::size_t i = z; i > 0; --i)
    g[i - 1] = g[i] - std::exp(std::min(xi[i - 1], pareto_exponent_cap));
  return DiscreteSeries(-static_cast<long>(spec.n), std::move(g));
}

/// Whether some partial sum sum_{j=0..k} e^{-rate j} e^{xi_j} exceeds bound.
/// Runs in log space, so astronomically large terms are handled exactly.
inline bool pareto_partial_sums_exceed(const std::vector<double>& xi, double rate, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("pareto_partial_sums_exceed: bound must be > 0");
  const double log_bound = std::log(bound);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < xi.size(); ++j) {
    const double term = xi[j] - rate * static_cast<double>(j);
    const double hi = std::max(log_sum, term);
    const double lo = std::min(log_sum, term);
    log_sum = hi + std::log1p(std::exp(lo - hi));
    if (log_sum > log_bound) return true;
  }
  return false;
}

}  // namespace lamperti
