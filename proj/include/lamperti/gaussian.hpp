#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lamperti/fft.hpp"
#include "lamperti/rng.hpp"

namespace lamperti::detail {

/// In-place lower Cholesky factor of a dense symmetric matrix (row-major).
/// Returns false when a pivot is not positive.
inline bool cholesky_lower(std::vector<double>& m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= m[i * n + k] * m[j * n + k];
      if (i == j) {
        if (!(s > 0.0)) return false;
        m[i * n + i] = std::sqrt(s);
      } else {
        m[i * n + j] = s / m[j * n + j];
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = 0.0;
  }
  return true;
}

/// Exact-in-law sampler for a zero-mean stationary Gaussian sequence with
/// autocovariance acov(k), k = 0..n-1, by circulant embedding: eigenvalues
/// of the length-2n wrap come from one FFT; each draw costs one more. The
/// embedding is retried at twice the length if it fails to be nonnegative
/// definite, and falls back to a dense Toeplitz Cholesky after that.
class StationaryGaussianSampler {
 public:
  static constexpr std::size_t cholesky_limit = 8192;

  StationaryGaussianSampler(const std::function<double(std::size_t)>& acov, std::size_t n)
      : n_(n) {
    if (n < 1) throw std::invalid_argument("StationaryGaussianSampler: empty sequence");
    if (n == 1) {
      chol_ = {std::sqrt(acov(0))};
      return;
    }
    for (std::size_t m = 2 * n; m <= 8 * n; m *= 2)
      if (try_embedding(acov, m)) return;
    build_cholesky(acov);
  }

  std::size_t size() const { return n_; }
  bool circulant() const { return !scale_.empty(); }

  std::vector<double> sample(RngStream& rng) const {
    if (n_ == 1) return {chol_[0] * rng.gaussian()};
    return circulant() ? sample_circulant(rng) : sample_cholesky(rng);
  }

 private:
  bool try_embedding(const std::function<double(std::size_t)>& acov, std::size_t m) {
    std::vector<cplx> c(m);
    for (std::size_t j = 0; j <= m / 2; ++j) c[j] = cplx(acov(j), 0.0);
    for (std::size_t j = m / 2 + 1; j < m; ++j) c[j] = c[m - j];
    Dft plan(m);
    plan.forward(c);
    double max_eig = 0.0;
    for (const auto& e : c) max_eig = std::max(max_eig, e.real());
    const double tol = 1e-9 * std::max(max_eig, 1.0);
    for (const auto& e : c)
      if (e.real() < -tol) return false;
    scale_.resize(m);
    const double dm = static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double lam = std::max(c[k].real(), 0.0);
      const bool self_conjugate = (k == 0 || 2 * k == m);
      scale_[k] = std::sqrt(lam / (self_conjugate ? dm : 2.0 * dm));
    }
    plan_ = std::make_shared<Dft>(m);
    return true;
  }

  void build_cholesky(const std::function<double(std::size_t)>& acov) {
    if (n_ > cholesky_limit)
      throw std::length_error("StationaryGaussianSampler: sequence too long for Cholesky fallback");
    chol_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) chol_[i * n_ + j] = acov(i > j ? i - j : j - i);
    // tiny diagonal lift retries rounding-level indefiniteness only
    if (!cholesky_lower(chol_, n_)) {
      const double lift = 1e-12 * acov(0);
      for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
          chol_[i * n_ + j] = acov(i > j ? i - j : j - i) + (i == j ? lift : 0.0);
      if (!cholesky_lower(chol_, n_))
        throw std::runtime_error("StationaryGaussianSampler: covariance not positive definite");
    }
  }

  std::vector<double> sample_circulant(RngStream& rng) const {
    const std::size_t m = scale_.size();
    std::vector<cplx> a(m);
    a[0] = cplx(scale_[0] * rng.gaussian(), 0.0);
    for (std::size_t k = 1; k < m / 2; ++k) {
      const double re = rng.gaussian();
      const double im = rng.gaussian();
      a[k] = cplx(scale_[k] * re, scale_[k] * im);
      a[m - k] = std::conj(a[k]);
    }
    a[m / 2] = cplx(scale_[m / 2] * rng.gaussian(), 0.0);
    plan_->forward(a);
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = a[j].real();
    return out;
  }

  std::vector<double> sample_cholesky(RngStream& rng) const {
    std::vector<double> g(n_);
    for (auto& x : g) x = rng.gaussian();
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += chol_[i * n_ + j] * g[j];
      out[i] = s;
    }
    return out;
  }

  std::size_t n_;
  std::vector<double> scale_;          // circulant: sqrt(lambda_k / norm)
  std::shared_ptr<Dft> plan_;          // shared across sampler copies
  std::vector<double> chol_;           // fallback: dense lower factor
};

/// Dense sampler for an arbitrary Gaussian vector given its covariance
/// matrix entries; used for fractional Brownian motion on grids where the
/// stationary-increment shortcut does not apply.
class GaussianVectorSampler {
 public:
  static constexpr std::size_t size_limit = 4096;

  GaussianVectorSampler(const std::function<double(std::size_t, std::size_t)>& cov, std::size_t n)
      : n_(n) {
    if (n < 1) throw std::invalid_argument("GaussianVectorSampler: empty vector");
    if (n > size_limit) throw std::length_error("GaussianVectorSampler: dimension too large");
    chol_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) chol_[i * n + j] = cov(i, j);
    if (!cholesky_lower(chol_, n_)) {
      double max_var = 0.0;
      for (std::size_t i = 0; i < n; ++i) max_var = std::max(max_var, cov(i, i));
      const double lift = 1e-12 * max_var;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          chol_[i * n + j] = cov(i, j) + (i == j ? lift : 0.0);
      if (!cholesky_lower(chol_, n_))
        throw std::runtime_error("GaussianVectorSampler: covariance not positive definite");
    }
  }

  std::size_t size() const { return n_; }

  std::vector<double> sample(RngStream& rng) const {
    std::vector<double> g(n_);
    for (auto& x : g) x = rng.gaussian();
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += chol_[i * n_ + j] * g[j];
      out[i] = s;
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<double> chol_;
};

}  // namespace lamperti::detail
