#pragma once

// Brute-force references used only by the test suites. Nothing here calls the
// fast paths it is compared against.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "flagmf/operators.hpp"

namespace flagmf::oracle {

inline std::int64_t inverse_by_scan(std::int64_t x, std::int64_t n) {
  for (std::int64_t y = 1; y < n; ++y) {
    if ((x * y) % n == 1) return y;
  }
  return -1;
}

inline std::set<std::int64_t> nonzero_squares(std::int64_t n) {
  std::set<std::int64_t> sq;
  for (std::int64_t x = 1; x < n; ++x) sq.insert((x * x) % n);
  return sq;
}

inline int legendre_by_squares(std::int64_t a, std::int64_t n) {
  a %= n;
  if (a == 0) return 0;
  return nonzero_squares(n).count(a) ? 1 : -1;
}

inline std::int64_t order_by_scan(std::int64_t x, std::int64_t n) {
  std::int64_t y = x % n;
  for (std::int64_t k = 1; k < n; ++k) {
    if (y == 1) return k;
    y = (y * x) % n;
  }
  return -1;
}

inline std::int64_t smallest_primitive_root(std::int64_t n) {
  for (std::int64_t r = 2; r < n; ++r) {
    if (order_by_scan(r, n) == n - 1) return r;
  }
  return -1;
}

inline Complex e(std::int64_t k, std::int64_t n) {
  const std::int64_t r = ((k % n) + n) % n;
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
}

/// O(N^2) DFT with 1/sqrt(N) normalization.
inline std::vector<Complex> direct_dft(const std::vector<Complex>& f) {
  const auto n = static_cast<std::int64_t>(f.size());
  std::vector<Complex> out(f.size());
  for (std::int64_t w = 0; w < n; ++w) {
    Complex acc{};
    for (std::int64_t j = 0; j < n; ++j) acc += e(-w * j, n) * f[static_cast<std::size_t>(j)];
    out[static_cast<std::size_t>(w)] = acc / std::sqrt(static_cast<double>(n));
  }
  return out;
}

/// result[tau] = sum_n f[-n] g[tau + n], evaluated term by term.
inline std::vector<Complex> direct_convolve(const std::vector<Complex>& f, const std::vector<Complex>& g) {
  const auto n = static_cast<std::int64_t>(f.size());
  std::vector<Complex> out(f.size());
  for (std::int64_t tau = 0; tau < n; ++tau) {
    Complex acc{};
    for (std::int64_t k = 0; k < n; ++k) {
      acc += f[static_cast<std::size_t>(((-k) % n + n) % n)] * g[static_cast<std::size_t>((tau + k) % n)];
    }
    out[static_cast<std::size_t>(tau)] = acc;
  }
  return out;
}

/// M[tau][omega] = sum_n R[n] conj(e(omega n) S[n + tau]) straight from the definition.
inline std::vector<std::vector<Complex>> direct_mf(const std::vector<Complex>& r, const std::vector<Complex>& s) {
  const auto n = static_cast<std::int64_t>(r.size());
  std::vector<std::vector<Complex>> m(r.size(), std::vector<Complex>(r.size()));
  for (std::int64_t tau = 0; tau < n; ++tau) {
    for (std::int64_t w = 0; w < n; ++w) {
      Complex acc{};
      for (std::int64_t k = 0; k < n; ++k) {
        acc += r[static_cast<std::size_t>(k)] * std::conj(e(w * k, n) * s[static_cast<std::size_t>((k + tau) % n)]);
      }
      m[static_cast<std::size_t>(tau)][static_cast<std::size_t>(w)] = acc;
    }
  }
  return m;
}

using Mat2 = std::array<std::int64_t, 4>;

inline Mat2 mat_mul(const Mat2& x, const Mat2& y, std::int64_t n) {
  auto md = [n](std::int64_t v) { return ((v % n) + n) % n; };
  return {md(x[0] * y[0] + x[1] * y[2]), md(x[0] * y[1] + x[1] * y[3]), md(x[2] * y[0] + x[3] * y[2]),
          md(x[2] * y[1] + x[3] * y[3])};
}

inline std::vector<Mat2> all_sl2(std::int64_t n) {
  std::vector<Mat2> out;
  for (std::int64_t a = 0; a < n; ++a)
    for (std::int64_t b = 0; b < n; ++b)
      for (std::int64_t c = 0; c < n; ++c)
        for (std::int64_t d = 0; d < n; ++d)
          if (((a * d - b * c) % n + n) % n == 1) out.push_back({a, b, c, d});
  return out;
}

/// g A g^{-1} as a set of matrices.
inline std::set<Mat2> conjugate_diagonal(const Mat2& g, std::int64_t n) {
  const Mat2 g_inv = {g[3], (n - g[1]) % n, (n - g[2]) % n, g[0]};
  std::set<Mat2> out;
  for (std::int64_t a = 1; a < n; ++a) {
    const Mat2 s = {a, 0, 0, inverse_by_scan(a, n)};
    out.insert(mat_mul(mat_mul(g, s, n), g_inv, n));
  }
  return out;
}

/// Dense N x N matrix of rho(g), built column by column from the
/// Fourier/chirp/scaling formulas written out as matrices.
class DenseOperator {
 public:
  explicit DenseOperator(std::int64_t n) : n_(n), m_(static_cast<std::size_t>(n * n), Complex{}) {}

  static DenseOperator identity(std::int64_t n) {
    DenseOperator op(n);
    for (std::int64_t i = 0; i < n; ++i) op.at(i, i) = 1.0;
    return op;
  }
  static DenseOperator chirp(std::int64_t c, std::int64_t n) {
    DenseOperator op(n);
    const std::int64_t half = (n + 1) / 2;
    for (std::int64_t i = 0; i < n; ++i) op.at(i, i) = e(-half * c % n * (i * i % n), n);
    return op;
  }
  static DenseOperator fourier(std::int64_t n) {
    DenseOperator op(n);
    const Complex powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex scale = powers[((n - 1) / 2) % 4] / std::sqrt(static_cast<double>(n));
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) op.at(i, j) = scale * e(-i * j, n);
    return op;
  }
  static DenseOperator scaling(std::int64_t a, std::int64_t n) {
    DenseOperator op(n);
    const std::int64_t a_inv = inverse_by_scan(a, n);
    const double sign = legendre_by_squares(a, n);
    for (std::int64_t i = 0; i < n; ++i) op.at(i, (a_inv * i) % n) = sign;
    return op;
  }

  Complex& at(std::int64_t i, std::int64_t j) { return m_[static_cast<std::size_t>(i * n_ + j)]; }
  Complex at(std::int64_t i, std::int64_t j) const { return m_[static_cast<std::size_t>(i * n_ + j)]; }

  DenseOperator operator*(const DenseOperator& o) const {
    DenseOperator out(n_);
    for (std::int64_t i = 0; i < n_; ++i)
      for (std::int64_t k = 0; k < n_; ++k) {
        const Complex v = at(i, k);
        if (v == Complex{}) continue;
        for (std::int64_t j = 0; j < n_; ++j) out.at(i, j) += v * o.at(k, j);
      }
    return out;
  }

  std::vector<Complex> apply(const std::vector<Complex>& f) const {
    std::vector<Complex> out(f.size());
    for (std::int64_t i = 0; i < n_; ++i)
      for (std::int64_t j = 0; j < n_; ++j) out[static_cast<std::size_t>(i)] += at(i, j) * f[static_cast<std::size_t>(j)];
    return out;
  }

 private:
  std::int64_t n_;
  std::vector<Complex> m_;
};

/// Dense rho(g) from the big-cell formula u_{d/b} w u_{ab} diag(-1/b) or the
/// torus-cell formula u_{c/a} diag(a), solved independently of the library.
inline DenseOperator weil_matrix(const Mat2& g, std::int64_t n) {
  const auto [a, b, c, d] = g;
  if (b == 0) {
    const std::int64_t a_inv = inverse_by_scan(a, n);
    return DenseOperator::chirp(c * a_inv % n, n) * DenseOperator::scaling(a, n);
  }
  const std::int64_t b_inv = inverse_by_scan(b, n);
  return DenseOperator::chirp(d * b_inv % n, n) * DenseOperator::fourier(n) * DenseOperator::chirp(a * b % n, n) *
         DenseOperator::scaling((n - b_inv) % n, n);
}

inline std::vector<Complex> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  std::vector<Complex> v(n);
  for (auto& x : v) x = {dist(rng), dist(rng)};
  return v;
}

inline std::vector<Complex> to_vector(const Sequence& s) { return {s.values().begin(), s.values().end()}; }

inline double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace flagmf::oracle
