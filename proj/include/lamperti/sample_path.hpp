#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "lamperti/rng.hpp"
#include "lamperti/time_grid.hpp"

namespace lamperti {

/// Self-similarity / class index H. Always positive; generators that need
/// fractional Brownian motion restrict it further to (0, 1) themselves.
struct Hurst {
  double value;
  explicit Hurst(double h) : value(h) {
    if (!(h > 0.0) || !std::isfinite(h))
      throw std::invalid_argument("Hurst: H must be positive and finite");
  }
};

/// One realization of a process: a grid plus one value per grid point.
struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;

  SamplePath(TimeGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size())
      throw std::invalid_argument("SamplePath: values/grid size mismatch");
    for (double x : values)
      if (!std::isfinite(x)) throw std::invalid_argument("SamplePath: non-finite value");
  }

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return grid[i]; }

  /// Linear interpolation inside the grid span; exact at grid points.
  double value_at(double t) const {
    if (auto i = grid.try_index_of(t)) return values[*i];
    if (!grid.contains(t)) throw std::out_of_range("SamplePath: time outside span");
    const std::size_t i = grid.cell_of(t);
    const double t0 = grid[i], t1 = grid[i + 1];
    const double w = (t - t0) / (t1 - t0);
    return values[i] + w * (values[i + 1] - values[i]);
  }
};

inline SamplePath slice(const SamplePath& x, std::size_t first, std::size_t last) {
  return SamplePath(x.grid.slice(first, last),
                    std::vector<double>(x.values.begin() + static_cast<std::ptrdiff_t>(first),
                                        x.values.begin() + static_cast<std::ptrdiff_t>(last) + 1));
}

/// Integer-indexed series U_n, n = start_index, start_index+1, ...
struct DiscreteSeries {
  long start_index = 0;
  std::vector<double> values;

  DiscreteSeries() = default;
  DiscreteSeries(long start, std::vector<double> v) : start_index(start), values(std::move(v)) {
    for (double x : values)
      if (!std::isfinite(x)) throw std::invalid_argument("DiscreteSeries: non-finite value");
  }

  std::size_t size() const { return values.size(); }
  long first_index() const { return start_index; }
  long last_index() const { return start_index + static_cast<long>(values.size()) - 1; }
  bool has_index(long n) const { return n >= first_index() && n <= last_index(); }
  double at(long n) const {
    if (!has_index(n)) throw std::out_of_range("DiscreteSeries: index out of range");
    return values[static_cast<std::size_t>(n - start_index)];
  }
  double& at(long n) {
    if (!has_index(n)) throw std::out_of_range("DiscreteSeries: index out of range");
    return values[static_cast<std::size_t>(n - start_index)];
  }
};

/// View a discrete series as a path on the unit-step grid t = n.
inline SamplePath to_sample_path(const DiscreteSeries& s) {
  if (s.size() < 2) throw std::invalid_argument("to_sample_path: need at least 2 points");
  return SamplePath(TimeGrid::uniform_points(static_cast<double>(s.start_index), 1.0, s.size()),
                    s.values);
}

namespace detail {

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);
}

}  // namespace detail

/// N independent paths on one shared grid, with the seed lineage that made
/// them. Same (seed, stream_ids) regenerates the values bit-exactly.
struct Ensemble {
  TimeGrid grid;
  std::vector<std::vector<double>> values;  // [path][grid point]
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> stream_ids;

  std::size_t n_paths() const { return values.size(); }

  SamplePath path(std::size_t i) const {
    if (i >= values.size()) throw std::out_of_range("Ensemble: path index");
    return SamplePath(grid, values[i]);
  }

  /// Across-ensemble marginal sample {X_t} at a fixed grid time.
  std::vector<double> at_time(double t) const {
    const std::size_t k = grid.index_of(t);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i][k];
    return out;
  }
};

/// Generate an ensemble from a per-path sampler. The sampler is called with
/// a fresh RngStream(seed, stream_id) per path, so results do not depend on
/// the thread count.
template <typename PathFn>
Ensemble generate_ensemble(const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed,
                           PathFn&& sample_path, unsigned threads = 1) {
  if (n_paths == 0) throw std::invalid_argument("generate_ensemble: need at least one path");
  Ensemble ens{grid, std::vector<std::vector<double>>(n_paths), seed, {}};
  ens.stream_ids.resize(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) ens.stream_ids[i] = i;
  detail::parallel_for(n_paths, threads, [&](std::size_t i) {
    RngStream rng(seed, ens.stream_ids[i]);
    ens.values[i] = sample_path(grid, rng);
    if (ens.values[i].size() != grid.size())
      throw std::logic_error("generate_ensemble: sampler returned wrong length");
  });
  return ens;
}

}  // namespace lamperti
