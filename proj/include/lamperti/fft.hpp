#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lamperti::detail {

using cplx = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 FFT, forward convention e^{-2 pi i jk / n}.
inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) throw std::logic_error("fft_pow2: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

/// DFT of arbitrary length: radix-2 directly, Bluestein's chirp-z otherwise.
/// The chirp and the transformed filter are precomputed, so repeated
/// transforms of the same length (ensemble synthesis) pay only two
/// power-of-two FFTs each.
class Dft {
 public:
  explicit Dft(std::size_t n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Dft: empty transform");
    if (is_pow2(n_)) return;
    conv_len_ = next_pow2(2 * n_ - 1);
    chirp_.resize(n_);
    const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      // exponent j^2 mod 2n keeps the angle argument small and exact
      const std::uint64_t m =
          (static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(j)) % two_n;
      const double ang = -std::numbers::pi * static_cast<double>(m) / static_cast<double>(n_);
      chirp_[j] = cplx(std::cos(ang), std::sin(ang));
    }
    filter_.assign(conv_len_, cplx(0.0, 0.0));
    filter_[0] = std::conj(chirp_[0]);
    for (std::size_t j = 1; j < n_; ++j) {
      filter_[j] = std::conj(chirp_[j]);
      filter_[conv_len_ - j] = std::conj(chirp_[j]);
    }
    fft_pow2(filter_, false);
  }

  std::size_t size() const { return n_; }

  void forward(std::vector<cplx>& a) const {
    if (a.size() != n_) throw std::invalid_argument("Dft: wrong input size");
    if (is_pow2(n_)) {
      fft_pow2(a, false);
      return;
    }
    std::vector<cplx> work(conv_len_, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < n_; ++j) work[j] = a[j] * chirp_[j];
    fft_pow2(work, false);
    for (std::size_t j = 0; j < conv_len_; ++j) work[j] *= filter_[j];
    fft_pow2(work, true);
    for (std::size_t k = 0; k < n_; ++k) a[k] = work[k] * chirp_[k];
  }

  void inverse(std::vector<cplx>& a) const {
    for (auto& x : a) x = std::conj(x);
    forward(a);
    const double inv = 1.0 / static_cast<double>(n_);
    for (auto& x : a) x = std::conj(x) * inv;
  }

 private:
  std::size_t n_;
  std::size_t conv_len_ = 0;
  std::vector<cplx> chirp_;
  std::vector<cplx> filter_;
};

}  // namespace lamperti::detail
