#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lamperti {

enum class GridKind { uniform, geometric, explicit_points };

inline const char* to_string(GridKind k) {
  switch (k) {
    case GridKind::uniform: return "uniform";
    case GridKind::geometric: return "geometric";
    default: return "explicit";
  }
}

/// Strictly increasing sampling times shared by every path built on them.
/// Immutable after construction; copies are cheap (points are shared).
class TimeGrid {
 public:
  static constexpr std::size_t max_points = std::size_t{1} << 31;

  /// Uniform grid t0, t0+dt, ..., t0+n*dt covering [start, stop].
  static TimeGrid uniform(double start, double stop, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("TimeGrid: step must be > 0");
    if (!(stop > start)) throw std::invalid_argument("TimeGrid: stop must exceed start");
    const double n_real = (stop - start) / step;
    if (n_real > static_cast<double>(max_points))
      throw std::length_error("TimeGrid: too many points");
    auto n = static_cast<std::size_t>(std::llround(n_real));
    if (n < 1) n = 1;
    return uniform_points(start, step, n + 1);
  }

  static TimeGrid uniform_points(double start, double step, std::size_t n_points) {
    if (!(step > 0.0)) throw std::invalid_argument("TimeGrid: step must be > 0");
    check_count(n_points);
    std::vector<double> pts(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
      pts[i] = start + static_cast<double>(i) * step;
    return TimeGrid(std::move(pts), GridKind::uniform, step);
  }

  /// Geometric grid t0, t0*r, t0*r^2, ... with t0 > 0 and ratio r > 1.
  static TimeGrid geometric(double start, double stop, double ratio) {
    if (!(start > 0.0)) throw std::invalid_argument("TimeGrid: geometric start must be > 0");
    if (!(ratio > 1.0)) throw std::invalid_argument("TimeGrid: geometric ratio must be > 1");
    if (!(stop > start)) throw std::invalid_argument("TimeGrid: stop must exceed start");
    const double n_real = std::log(stop / start) / std::log(ratio);
    if (n_real > static_cast<double>(max_points))
      throw std::length_error("TimeGrid: too many points");
    auto n = static_cast<std::size_t>(std::llround(n_real));
    if (n < 1) n = 1;
    return geometric_points(start, ratio, n + 1);
  }

  static TimeGrid geometric_points(double start, double ratio, std::size_t n_points) {
    if (!(start > 0.0)) throw std::invalid_argument("TimeGrid: geometric start must be > 0");
    if (!(ratio > 1.0)) throw std::invalid_argument("TimeGrid: geometric ratio must be > 1");
    check_count(n_points);
    std::vector<double> pts(n_points);
    double t = start;
    for (std::size_t i = 0; i < n_points; ++i) {
      pts[i] = t;
      t *= ratio;
    }
    return TimeGrid(std::move(pts), GridKind::geometric, ratio);
  }

  /// Grid from explicit points; the kind (uniform/geometric/explicit) is
  /// detected from the spacing so mapped grids keep a useful classification.
  static TimeGrid from_points(std::vector<double> pts) {
    check_count(pts.size());
    validate(pts);
    if (const auto step = detect_uniform(pts))
      return TimeGrid(std::move(pts), GridKind::uniform, *step);
    if (const auto ratio = detect_geometric(pts))
      return TimeGrid(std::move(pts), GridKind::geometric, *ratio);
    return TimeGrid(std::move(pts), GridKind::explicit_points, 0.0);
  }

  const std::vector<double>& points() const { return *pts_; }
  std::size_t size() const { return pts_->size(); }
  double operator[](std::size_t i) const { return (*pts_)[i]; }
  double front() const { return pts_->front(); }
  double back() const { return pts_->back(); }
  double span() const { return back() - front(); }
  GridKind kind() const { return kind_; }

  double step() const {
    if (kind_ != GridKind::uniform) throw std::logic_error("TimeGrid: not uniform");
    return step_or_ratio_;
  }
  double ratio() const {
    if (kind_ != GridKind::geometric) throw std::logic_error("TimeGrid: not geometric");
    return step_or_ratio_;
  }

  bool contains(double t) const {
    const double tol = locate_tolerance();
    return t >= front() - tol && t <= back() + tol;
  }

  /// Index of the grid point equal to t (within a tight tolerance).
  std::optional<std::size_t> try_index_of(double t) const {
    if (!contains(t)) return std::nullopt;
    const auto& p = *pts_;
    auto it = std::lower_bound(p.begin(), p.end(), t);
    const double tol = locate_tolerance();
    if (it != p.end() && std::abs(*it - t) <= tol)
      return static_cast<std::size_t>(it - p.begin());
    if (it != p.begin() && std::abs(*(it - 1) - t) <= tol)
      return static_cast<std::size_t>(it - p.begin() - 1);
    return std::nullopt;
  }

  std::size_t index_of(double t) const {
    if (auto i = try_index_of(t)) return *i;
    throw std::out_of_range("TimeGrid: time " + std::to_string(t) + " is not a grid point");
  }

  std::optional<std::size_t> zero_index() const { return try_index_of(0.0); }

  /// Cell index i with points[i] <= t <= points[i+1]; t must lie in the span.
  std::size_t cell_of(double t) const {
    if (!contains(t)) throw std::out_of_range("TimeGrid: time outside span");
    const auto& p = *pts_;
    auto it = std::upper_bound(p.begin(), p.end(), t);
    std::size_t i = (it == p.begin()) ? 0 : static_cast<std::size_t>(it - p.begin() - 1);
    return std::min(i, p.size() - 2);
  }

  /// Sub-grid over indices [first, last] inclusive.
  TimeGrid slice(std::size_t first, std::size_t last) const {
    if (first >= last || last >= size()) throw std::out_of_range("TimeGrid: bad slice");
    return from_points(std::vector<double>(pts_->begin() + static_cast<std::ptrdiff_t>(first),
                                           pts_->begin() + static_cast<std::ptrdiff_t>(last) + 1));
  }

  bool same_points(const TimeGrid& other) const {
    return pts_ == other.pts_ || *pts_ == *other.pts_;
  }

 private:
  TimeGrid(std::vector<double> pts, GridKind kind, double q)
      : pts_(std::make_shared<const std::vector<double>>(std::move(pts))),
        kind_(kind),
        step_or_ratio_(q) {
    validate(*pts_);
  }

  static void check_count(std::size_t n) {
    if (n < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    if (n > max_points) throw std::length_error("TimeGrid: too many points");
  }

  static void validate(const std::vector<double>& p) {
    if (p.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 points");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p[i])) throw std::invalid_argument("TimeGrid: non-finite time");
      if (i > 0 && !(p[i] > p[i - 1]))
        throw std::invalid_argument("TimeGrid: times must be strictly increasing");
    }
  }

  static std::optional<double> detect_uniform(const std::vector<double>& p) {
    const double step = (p.back() - p.front()) / static_cast<double>(p.size() - 1);
    const double tol = 1e-9 * std::max(std::abs(step), 1e-300);
    for (std::size_t i = 1; i < p.size(); ++i)
      if (std::abs((p[i] - p[i - 1]) - step) > tol) return std::nullopt;
    return step;
  }

  static std::optional<double> detect_geometric(const std::vector<double>& p) {
    if (p.front() <= 0.0) return std::nullopt;
    const double ratio = p[1] / p[0];
    if (!(ratio > 1.0)) return std::nullopt;
    const double tol = 1e-9 * ratio;
    for (std::size_t i = 1; i < p.size(); ++i)
      if (std::abs(p[i] / p[i - 1] - ratio) > tol) return std::nullopt;
    return ratio;
  }

  double locate_tolerance() const {
    return 1e-9 * std::max({std::abs(front()), std::abs(back()), 1e-12});
  }

  std::shared_ptr<const std::vector<double>> pts_;
  GridKind kind_;
  double step_or_ratio_;
};

}  // namespace lamperti
