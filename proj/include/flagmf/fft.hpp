#pragma once

// Power-of-two FFT and Bluestein's chirp-z reduction for arbitrary (prime) lengths.

#include <bit>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace flagmf::fft {

using Complex = std::complex<double>;

/// Iterative radix-2 plan. Immutable after construction, shareable across threads.
class Radix2Plan {
 public:
  explicit Radix2Plan(std::size_t size) : size_(size), twiddles_(size / 2), bitrev_(size) {
    if (size == 0 || !std::has_single_bit(size)) throw std::invalid_argument("radix-2 size must be a power of two");
    for (std::size_t k = 0; k < size / 2; ++k) {
      twiddles_[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(size));
    }
    const int bits = std::countr_zero(size);
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
      bitrev_[i] = r;
    }
  }

  std::size_t size() const noexcept { return size_; }

  /// Unnormalized forward (sign -1) or inverse (sign +1) transform in place.
  void transform(std::span<Complex> data, bool inverse) const {
    if (data.size() != size_) throw std::invalid_argument("radix-2 transform size mismatch");
    for (std::size_t i = 0; i < size_; ++i) {
      if (i < bitrev_[i]) std::swap(data[i], data[bitrev_[i]]);
    }
    for (std::size_t len = 2; len <= size_; len <<= 1U) {
      const std::size_t half = len / 2;
      const std::size_t stride = size_ / len;
      for (std::size_t start = 0; start < size_; start += len) {
        for (std::size_t j = 0; j < half; ++j) {
          Complex w = twiddles_[j * stride];
          if (inverse) w = std::conj(w);
          const Complex u = data[start + j];
          const Complex v = data[start + j + half] * w;
          data[start + j] = u + v;
          data[start + j + half] = u - v;
        }
      }
    }
  }

 private:
  std::size_t size_;
  std::vector<Complex> twiddles_;
  std::vector<std::size_t> bitrev_;
};

inline std::size_t padded_size(std::size_t n) { return std::bit_ceil(2 * n - 1); }

/// Length-n DFT X[k] = sum_j x[j] e^{-2 pi i jk/n} (unnormalized) via Bluestein.
class BluesteinPlan {
 public:
  explicit BluesteinPlan(std::size_t n) : n_(n), inner_(padded_size(n)), chirp_(n), kernel_spectrum_(inner_.size()) {
    if (n == 0) throw std::invalid_argument("empty DFT");
    // chirp[j] = e^{-pi i j^2 / n}; j^2 reduced mod 2n keeps the argument small.
    const std::size_t two_n = 2 * n;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t q = static_cast<std::size_t>((static_cast<unsigned __int128>(j) * j) % two_n);
      chirp_[j] = std::polar(1.0, -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n));
    }
    const std::size_t m = inner_.size();
    kernel_spectrum_[0] = std::conj(chirp_[0]);
    for (std::size_t j = 1; j < n; ++j) {
      kernel_spectrum_[j] = std::conj(chirp_[j]);
      kernel_spectrum_[m - j] = std::conj(chirp_[j]);
    }
    inner_.transform(kernel_spectrum_, false);
  }

  std::size_t size() const noexcept { return n_; }

  /// Unnormalized transform; inverse uses the +i sign.
  std::vector<Complex> transform(std::span<const Complex> x, bool inverse = false) const {
    if (x.size() != n_) throw std::invalid_argument("Bluestein transform size mismatch");
    const std::size_t m = inner_.size();
    std::vector<Complex> work(m, Complex{});
    for (std::size_t j = 0; j < n_; ++j) {
      const Complex in = inverse ? std::conj(x[j]) : x[j];
      work[j] = in * chirp_[j];
    }
    inner_.transform(work, false);
    for (std::size_t k = 0; k < m; ++k) work[k] *= kernel_spectrum_[k];
    inner_.transform(work, true);
    const double scale = 1.0 / static_cast<double>(m);
    std::vector<Complex> out(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex v = work[k] * scale * chirp_[k];
      out[k] = inverse ? std::conj(v) : v;
    }
    return out;
  }

 private:
  std::size_t n_;
  Radix2Plan inner_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_spectrum_;
};

/// Circular convolution (f (*) g)[t] = sum_m f[m] g[t - m] through a zero-padded
/// power-of-two linear convolution folded back onto Z_n.
inline std::vector<Complex> circular_convolve(std::span<const Complex> f, std::span<const Complex> g) {
  if (f.size() != g.size()) throw std::invalid_argument("convolution operands differ in length");
  const std::size_t n = f.size();
  const Radix2Plan plan(padded_size(n));
  const std::size_t m = plan.size();
  std::vector<Complex> a(m, Complex{});
  std::vector<Complex> b(m, Complex{});
  std::copy(f.begin(), f.end(), a.begin());
  std::copy(g.begin(), g.end(), b.begin());
  plan.transform(a, false);
  plan.transform(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  plan.transform(a, true);
  const double scale = 1.0 / static_cast<double>(m);
  std::vector<Complex> out(n, Complex{});
  for (std::size_t k = 0; k + 1 < 2 * n; ++k) out[k % n] += a[k] * scale;
  return out;
}

}  // namespace flagmf::fft
