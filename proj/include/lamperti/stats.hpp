#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "lamperti/integrate.hpp"
#include "lamperti/sample_path.hpp"

namespace lamperti {

/// Outcome of one statistical verification. For KS-type tests the invariant
/// pass == (statistic <= threshold) holds, with the threshold recorded.
struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::vector<std::size_t> n_samples;
  std::string details;
};

namespace detail {

/// KS critical factor: P(D > c * sqrt((m+n)/(m n))) ~ alpha asymptotically.
inline double ks_critical_factor(double alpha) {
  return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

/// Two-sample KS statistic sup |F_a - F_b| by merging sorted copies.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline void require_sample(const std::vector<double>& s, const char* who) {
  if (s.empty()) throw std::invalid_argument(std::string(who) + ": empty sample");
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

/// Classical two-sample Kolmogorov-Smirnov test at the given significance,
/// with an optional Bonferroni correction when the caller runs several
/// comparisons under one budget.
inline TestReport ks_two_sample(const std::vector<double>& a, const std::vector<double>& b,
                                double significance = 0.01, std::size_t n_comparisons = 1) {
  detail::require_sample(a, "ks_two_sample");
  detail::require_sample(b, "ks_two_sample");
  if (!(significance > 0.0 && significance < 1.0))
    throw std::invalid_argument("ks_two_sample: significance must be in (0,1)");
  if (n_comparisons == 0) throw std::invalid_argument("ks_two_sample: n_comparisons == 0");
  const double m = static_cast<double>(a.size());
  const double n = static_cast<double>(b.size());
  TestReport r;
  r.name = "ks_two_sample";
  r.statistic = detail::ks_statistic(a, b);
  r.threshold = detail::ks_critical_factor(significance / static_cast<double>(n_comparisons)) *
                std::sqrt((m + n) / (m * n));
  r.pass = r.statistic <= r.threshold;
  r.n_samples = {a.size(), b.size()};
  std::ostringstream os;
  os << "D=" << r.statistic << " alpha=" << significance << " comparisons=" << n_comparisons;
  r.details = os.str();
  return r;
}

namespace detail {

/// Disjoint halves of an ensemble at a fixed grid time; keeps the two KS
/// samples independent (same-path samples would be correlated).
inline std::pair<std::vector<double>, std::vector<double>> split_marginal(const Ensemble& ens,
                                                                          double t) {
  const std::size_t k = ens.grid.index_of(t);
  const std::size_t half = ens.n_paths() / 2;
  std::vector<double> a(half), b(ens.n_paths() - half);
  for (std::size_t i = 0; i < half; ++i) a[i] = ens.values[i][k];
  for (std::size_t i = half; i < ens.n_paths(); ++i) b[i - half] = ens.values[i][k];
  return {std::move(a), std::move(b)};
}

inline void require_paths(const Ensemble& ens, const char* who) {
  if (ens.n_paths() < 1000)
    throw std::invalid_argument(std::string(who) +
                                ": need >= 1000 paths (500 per compared half)");
}

constexpr const char* kScopeNote = "; scope=marginal and pairwise-increment laws only";

}  // namespace detail

/// Across-ensemble stationarity check: marginals {U_t} vs {U_t+shift} plus,
/// for each positive lag l, increments {U_t+l - U_t} vs the shifted window.
/// Samples are taken across independent paths (never along one path) and the
/// ensemble is split into disjoint halves for the two sides of each KS test.
inline TestReport test_stationarity(const Ensemble& ens, const std::vector<double>& lags,
                                    double shift,
                                    double base_time = std::numeric_limits<double>::quiet_NaN(),
                                    double significance = 0.01) {
  detail::require_paths(ens, "test_stationarity");
  const double t0 = std::isnan(base_time) ? ens.grid.front() : base_time;
  const std::size_t i0 = ens.grid.index_of(t0);
  const std::size_t is = ens.grid.index_of(t0 + shift);

  std::vector<double> pos_lags;
  for (double l : lags)
    if (l > 0.0) pos_lags.push_back(l);
  const std::size_t k = 1 + pos_lags.size();

  const std::size_t half = ens.n_paths() / 2;
  auto gather = [&](std::size_t from, std::size_t to, std::size_t at,
                    std::ptrdiff_t minus) {
    std::vector<double> out;
    out.reserve(to - from);
    for (std::size_t p = from; p < to; ++p) {
      double v = ens.values[p][at];
      if (minus >= 0) v -= ens.values[p][static_cast<std::size_t>(minus)];
      out.push_back(v);
    }
    return out;
  };

  double worst = 0.0;
  std::ostringstream os;
  // marginal comparison
  {
    auto a = gather(0, half, i0, -1);
    auto b = gather(half, ens.n_paths(), is, -1);
    const double d = detail::ks_statistic(a, b);
    worst = std::max(worst, d);
    os << "marginal D=" << d;
  }
  for (double l : pos_lags) {
    const std::size_t il = ens.grid.index_of(t0 + l);
    const std::size_t isl = ens.grid.index_of(t0 + shift + l);
    auto a = gather(0, half, il, static_cast<std::ptrdiff_t>(i0));
    auto b = gather(half, ens.n_paths(), isl, static_cast<std::ptrdiff_t>(is));
    const double d = detail::ks_statistic(a, b);
    worst = std::max(worst, d);
    os << "; lag " << l << " D=" << d;
  }

  const double m = static_cast<double>(half);
  const double n = static_cast<double>(ens.n_paths() - half);
  TestReport r;
  r.name = "test_stationarity";
  r.statistic = worst;
  r.threshold = detail::ks_critical_factor(significance / static_cast<double>(k)) *
                std::sqrt((m + n) / (m * n));
  r.pass = r.statistic <= r.threshold;
  r.n_samples = {half, ens.n_paths() - half};
  os << "; shift=" << shift << " base=" << t0 << detail::kScopeNote;
  r.details = os.str();
  return r;
}

/// Marginal self-similarity check: {a^-H X_at} vs {X_t} across disjoint
/// ensemble halves, at two or more base times.
inline TestReport test_self_similarity(const Ensemble& ens, double hurst, double scale,
                                       std::vector<double> base_times = {},
                                       double significance = 0.01) {
  detail::require_paths(ens, "test_self_similarity");
  if (!(scale > 0.0) || scale == 1.0)
    throw std::invalid_argument("test_self_similarity: scale must be positive and != 1");
  if (base_times.empty()) {
    const double top = ens.grid.back() / scale;
    base_times = {0.5 * top, top};
  }
  if (base_times.size() < 2)
    throw std::invalid_argument("test_self_similarity: need >= 2 base times");

  const std::size_t half = ens.n_paths() / 2;
  const double factor = std::pow(scale, -hurst);
  double worst = 0.0;
  std::ostringstream os;
  os << "a=" << scale << " H=" << hurst;
  for (double t : base_times) {
    const std::size_t it = ens.grid.index_of(t);
    const std::size_t iat = ens.grid.index_of(scale * t);
    std::vector<double> scaled(half), plain(ens.n_paths() - half);
    for (std::size_t p = 0; p < half; ++p) scaled[p] = factor * ens.values[p][iat];
    for (std::size_t p = half; p < ens.n_paths(); ++p) plain[p - half] = ens.values[p][it];
    const double d = detail::ks_statistic(scaled, plain);
    worst = std::max(worst, d);
    os << "; t=" << t << " D=" << d;
  }

  const double m = static_cast<double>(half);
  const double n = static_cast<double>(ens.n_paths() - half);
  TestReport r;
  r.name = "test_self_similarity";
  r.statistic = worst;
  r.threshold =
      detail::ks_critical_factor(significance / static_cast<double>(base_times.size())) *
      std::sqrt((m + n) / (m * n));
  r.pass = r.statistic <= r.threshold;
  r.n_samples = {half, ens.n_paths() - half};
  os << detail::kScopeNote;
  r.details = os.str();
  return r;
}

/// Membership check for the class of admissible Langevin noises: the
/// truncated integral must converge under horizon doubling, and both the
/// weighted tail mass sum e^{rate u} |dG_u| and the decay e^{rate u} |G_u|
/// over the old part of the history must fall below tol.
inline TestReport test_gh_membership(const SamplePath& noise, double rate, double tol) {
  if (!(rate > 0.0)) throw std::invalid_argument("test_gh_membership: rate must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("test_gh_membership: tol must be > 0");
  const auto zero = noise.grid.zero_index();
  if (!zero) throw std::invalid_argument("test_gh_membership: grid must contain t = 0");
  const double history = -noise.grid.front();
  if (history < 16.0)
    throw std::invalid_argument("test_gh_membership: need history >= 16 (4 horizon doublings)");
  const double runway = std::max(2.0 * std::log(1.0 / tol) / rate, history / 8.0);
  if (runway > 0.5 * history)
    throw std::invalid_argument("test_gh_membership: history too short for this rate and tol");

  const auto imp = improper_exp_integral(noise, rate, 0.0, tol);

  const double u_star = -runway;
  double tail_mass = 0.0;
  double decay_max = 0.0;
  for (std::size_t i = 0; i + 1 <= *zero; ++i) {
    const double u = noise.grid[i];
    if (u > u_star) break;
    decay_max = std::max(decay_max, std::exp(rate * u) * std::abs(noise.values[i]));
    if (i + 1 <= *zero && noise.grid[i + 1] <= u_star) {
      const double du = std::abs(noise.values[i + 1] - noise.values[i]);
      tail_mass += std::exp(rate * noise.grid[i + 1]) * du;
    }
  }

  TestReport r;
  r.name = "test_gh_membership";
  r.statistic = std::max({imp.last_delta, tail_mass, decay_max});
  r.threshold = tol;
  r.pass = imp.converged && r.statistic <= tol;
  r.n_samples = {*zero + 1};
  std::ostringstream os;
  os << "converged=" << (imp.converged ? "yes" : "no") << " horizon=" << imp.horizon_used
     << " last_delta=" << imp.last_delta << " tail_mass=" << tail_mass
     << " decay=" << decay_max << " window=(-inf," << u_star << "]";
  r.details = os.str();
  return r;
}

/// Log-moment condition diagnostic on value samples of G_t for several
/// t in [0,1]: estimates E (log|G_t| 1_{|G_t|>1})^{2+delta} and flags
/// instability, either the estimate jumping under sample doubling or a
/// single observation carrying most of the mass (an infinite-moment
/// signature). Failing here does not prove the condition is violated;
/// it is a sufficient condition only.
inline TestReport log_moment_check_from_logs(const std::vector<std::vector<double>>& logs_by_t,
                                             double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("log_moment_check: delta must be > 0");
  if (logs_by_t.empty()) throw std::invalid_argument("log_moment_check: no samples");
  const double p = 2.0 + delta;

  double stat = 0.0;
  double max_moment = 0.0;
  std::ostringstream os;
  os << "p=" << p;
  std::size_t n_min = std::numeric_limits<std::size_t>::max();
  for (const auto& logs : logs_by_t) {
    if (logs.size() < 16) throw std::invalid_argument("log_moment_check: sample too small");
    n_min = std::min(n_min, logs.size());
    double sum = 0.0, sum_half = 0.0, biggest = 0.0;
    const std::size_t half = logs.size() / 2;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      const double y = logs[i] > 0.0 ? logs[i] : 0.0;
      const double yp = std::pow(y, p);
      sum += yp;
      if (i < half) sum_half += yp;
      biggest = std::max(biggest, yp);
    }
    const double m_full = sum / static_cast<double>(logs.size());
    const double m_half = sum_half / static_cast<double>(half);
    double ratio = (sum == 0.0 && sum_half == 0.0) ? 1.0 : m_full / m_half;
    if (std::isnan(ratio)) ratio = std::numeric_limits<double>::infinity();
    const double share = sum > 0.0 ? biggest / sum : 0.0;
    stat = std::max({stat, ratio / 2.0, share / 0.5});
    max_moment = std::max(max_moment, m_full);
    os << "; m=" << m_full << " ratio=" << ratio << " share=" << share;
  }

  TestReport r;
  r.name = "log_moment_check";
  r.statistic = stat;
  r.threshold = 1.0;
  r.pass = std::isfinite(max_moment) && stat <= 1.0;
  r.n_samples = {n_min};
  os << "; max_moment=" << max_moment << "; note=sufficient condition only";
  r.details = os.str();
  return r;
}

inline TestReport log_moment_check(const std::vector<std::vector<double>>& samples_by_t,
                                   double delta) {
  std::vector<std::vector<double>> logs(samples_by_t.size());
  for (std::size_t k = 0; k < samples_by_t.size(); ++k) {
    logs[k].reserve(samples_by_t[k].size());
    for (double v : samples_by_t[k]) logs[k].push_back(std::log(std::abs(v)));
  }
  return log_moment_check_from_logs(logs, delta);
}

struct Autocovariance {
  double lag = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

/// Across-ensemble autocovariance Cov(U_b, U_b+lag) at the grid's first time
/// b (or a caller-chosen base), one estimate per requested lag.
inline std::vector<Autocovariance> empirical_autocovariance(
    const Ensemble& ens, const std::vector<double>& lags,
    double base_time = std::numeric_limits<double>::quiet_NaN()) {
  if (ens.n_paths() < 2) throw std::invalid_argument("empirical_autocovariance: need >= 2 paths");
  const double t0 = std::isnan(base_time) ? ens.grid.front() : base_time;
  const auto x = ens.at_time(t0);
  const double n = static_cast<double>(x.size());
  const double mx = detail::mean_of(x);

  std::vector<Autocovariance> out;
  out.reserve(lags.size());
  for (double lag : lags) {
    const auto y = ens.at_time(t0 + lag);
    const double my = detail::mean_of(y);
    double s = 0.0;
    std::vector<double> prod(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      prod[i] = (x[i] - mx) * (y[i] - my);
      s += prod[i];
    }
    const double cov = s / (n - 1.0);
    const double pm = s / n;
    double varp = 0.0;
    for (double pr : prod) varp += (pr - pm) * (pr - pm);
    varp /= (n - 1.0);
    out.push_back({lag, cov, std::sqrt(varp / n)});
  }
  return out;
}

}  // namespace lamperti
