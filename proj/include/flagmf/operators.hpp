#pragma once

// Heisenberg operators, the unitary DFT, fast convolution on Z_N and the Weil
// operators rho(g) assembled from Fourier, chirp and scaling factors.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "flagmf/core_math.hpp"
#include "flagmf/errors.hpp"
#include "flagmf/fft.hpp"

namespace flagmf {

/// A vector in the Hilbert space of functions Z_N -> C.
class Sequence {
 public:
  explicit Sequence(const Modulus& modulus)
      : modulus_(modulus), values_(static_cast<std::size_t>(modulus.n()), Complex{}) {}

  Sequence(const Modulus& modulus, std::vector<Complex> values) : modulus_(modulus), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(modulus.n())) {
      throw DomainError("sequence length " + std::to_string(values_.size()) + " does not match N = " +
                        std::to_string(modulus.n()));
    }
  }

  static Sequence delta(const Modulus& modulus, std::int64_t position) {
    Sequence s(modulus);
    s.at(position) = 1.0;
    return s;
  }

  const Modulus& modulus() const noexcept { return modulus_; }
  std::int64_t n() const noexcept { return modulus_.n(); }
  std::size_t size() const noexcept { return values_.size(); }

  /// Index taken mod N.
  Complex& at(std::int64_t index) { return values_[static_cast<std::size_t>(modulus_.reduce(index))]; }
  const Complex& at(std::int64_t index) const { return values_[static_cast<std::size_t>(modulus_.reduce(index))]; }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }

  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }

  double norm_squared() const {
    double acc = 0.0;
    for (const auto& v : values_) acc += std::norm(v);
    return acc;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  Sequence& operator+=(const Sequence& o) {
    require_same(modulus_, o.modulus_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Sequence& operator-=(const Sequence& o) {
    require_same(modulus_, o.modulus_);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Sequence& operator*=(Complex s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend Sequence operator+(Sequence a, const Sequence& b) { return a += b; }
  friend Sequence operator-(Sequence a, const Sequence& b) { return a -= b; }
  friend Sequence operator*(Complex s, Sequence a) { return a *= s; }

 private:
  Modulus modulus_;
  std::vector<Complex> values_;
};

/// <f1, f2> = sum_n f1[n] conj(f2[n]).
inline Complex inner_product(const Sequence& f1, const Sequence& f2) {
  require_same(f1.modulus(), f2.modulus());
  Complex acc{};
  for (std::size_t i = 0; i < f1.size(); ++i) acc += f1[i] * std::conj(f2[i]);
  return acc;
}

inline double max_abs_diff(const Sequence& a, const Sequence& b) {
  require_same(a.modulus(), b.modulus());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// A point (tau, omega) of the time-frequency plane V = Z_N x Z_N.
struct TimeFreqShift {
  Residue tau;
  Residue omega;

  TimeFreqShift(const Residue& t, const Residue& w) : tau(t), omega(w) { require_same(t.modulus(), w.modulus()); }
  TimeFreqShift(std::int64_t t, std::int64_t w, const Modulus& m) : tau(t, m), omega(w, m) {}

  const Modulus& modulus() const noexcept { return tau.modulus(); }

  TimeFreqShift operator+(const TimeFreqShift& o) const { return {tau + o.tau, omega + o.omega}; }
  TimeFreqShift operator-(const TimeFreqShift& o) const { return {tau - o.tau, omega - o.omega}; }
  TimeFreqShift operator-() const { return {-tau, -omega}; }
  friend bool operator==(const TimeFreqShift&, const TimeFreqShift&) = default;
};

/// [pi(tau, omega) f][n] = e^{2 pi i omega n / N} f[n + tau].
inline Sequence heisenberg_apply(const TimeFreqShift& shift, const Sequence& f) {
  require_same(shift.modulus(), f.modulus());
  const auto& m = f.modulus();
  const std::int64_t tau = shift.tau.value();
  const std::int64_t omega = shift.omega.value();
  Sequence out(m);
  const double base = 2.0 * std::numbers::pi / static_cast<double>(m.n());
  for (std::int64_t n = 0; n < m.n(); ++n) {
    out.at(n) = std::polar(1.0, base * static_cast<double>(m.mul(omega, n))) * f.at(n + tau);
  }
  return out;
}

/// e^{2 pi i 2^{-1} tau omega / N} pi(tau, omega): the normalization of the
/// Heisenberg operators under which the Weil operators intertwine exactly,
/// rho(g) pi~(v) = pi~(g v) rho(g), and DFT pi~(tau, omega) = pi~(-omega, tau) DFT.
inline Sequence symmetric_heisenberg_apply(const TimeFreqShift& shift, const Sequence& f) {
  const auto& m = f.modulus();
  const std::int64_t k = m.mul(m.half(), m.mul(shift.tau.value(), shift.omega.value()));
  Sequence out = heisenberg_apply(shift, f);
  out *= std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m.n()));
  return out;
}

/// Unitary DFT: result[w] = N^{-1/2} sum_n e^{-2 pi i w n / N} f[n].
inline Sequence dft(const Sequence& f) {
  const fft::BluesteinPlan plan(f.size());
  auto out = plan.transform(f.values(), false);
  const double scale = 1.0 / std::sqrt(static_cast<double>(f.n()));
  for (auto& v : out) v *= scale;
  return {f.modulus(), std::move(out)};
}

inline Sequence inverse_dft(const Sequence& f) {
  const fft::BluesteinPlan plan(f.size());
  auto out = plan.transform(f.values(), true);
  const double scale = 1.0 / std::sqrt(static_cast<double>(f.n()));
  for (auto& v : out) v *= scale;
  return {f.modulus(), std::move(out)};
}

/// result[tau] = sum_n f[-n] g[tau + n], in O(N log N).
inline Sequence fast_convolve(const Sequence& f, const Sequence& g) {
  require_same(f.modulus(), g.modulus());
  return {f.modulus(), fft::circular_convolve(f.values(), g.values())};
}

/// Row-major 2x2 matrix over Z_N with determinant 1.
class GroupElement {
 public:
  GroupElement(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, const Modulus& m)
      : a_(a, m), b_(b, m), c_(c, m), d_(d, m) {
    if ((a_ * d_ - b_ * c_).value() != 1) {
      throw DomainError("matrix [[" + std::to_string(a_.value()) + "," + std::to_string(b_.value()) + "],[" +
                        std::to_string(c_.value()) + "," + std::to_string(d_.value()) +
                        "]] does not have determinant 1");
    }
  }

  static GroupElement identity(const Modulus& m) { return {1, 0, 0, 1, m}; }
  /// w = [[0,-1],[1,0]].
  static GroupElement weyl(const Modulus& m) { return {0, -1, 1, 0, m}; }
  /// u_c = [[1,0],[c,1]].
  static GroupElement unipotent(std::int64_t c, const Modulus& m) { return {1, 0, c, 1, m}; }
  /// diag(a, a^{-1}).
  static GroupElement diagonal(std::int64_t a, const Modulus& m) { return {a, 0, 0, inverse_mod(a, m), m}; }

  const Residue& a() const noexcept { return a_; }
  const Residue& b() const noexcept { return b_; }
  const Residue& c() const noexcept { return c_; }
  const Residue& d() const noexcept { return d_; }
  const Modulus& modulus() const noexcept { return a_.modulus(); }

  GroupElement operator*(const GroupElement& o) const {
    require_same(modulus(), o.modulus());
    return {(a_ * o.a_ + b_ * o.c_).value(), (a_ * o.b_ + b_ * o.d_).value(), (c_ * o.a_ + d_ * o.c_).value(),
            (c_ * o.b_ + d_ * o.d_).value(), modulus()};
  }

  GroupElement inverse() const { return {d_.value(), -b_.value(), -c_.value(), a_.value(), modulus()}; }

  friend bool operator==(const GroupElement&, const GroupElement&) = default;

 private:
  Residue a_, b_, c_, d_;
};

/// (tau, omega) -> (a tau + b omega, c tau + d omega).
inline TimeFreqShift group_act_on_plane(const GroupElement& g, const TimeFreqShift& v) {
  require_same(g.modulus(), v.modulus());
  return {g.a() * v.tau + g.b() * v.omega, g.c() * v.tau + g.d() * v.omega};
}

/// Omega(v1, v2) = tau1 omega2 - omega1 tau2.
inline Residue symplectic_form(const TimeFreqShift& v1, const TimeFreqShift& v2) {
  require_same(v1.modulus(), v2.modulus());
  return v1.tau * v2.omega - v1.omega * v2.tau;
}

/// g = u_first * s (torus cell, b = 0) or g = u_first * w * u_second * s (big cell).
struct BruhatFactorization {
  enum class Kind { kTorusCell, kBigCell };

  Kind kind;
  std::int64_t u;   // parameter of the leftmost unipotent factor
  std::int64_t u2;  // parameter of the inner unipotent factor (big cell only, else 0)
  std::int64_t s;   // diagonal parameter a of diag(a, a^{-1})
  Modulus modulus;

  GroupElement reconstruct() const {
    if (kind == Kind::kTorusCell) {
      return GroupElement::unipotent(u, modulus) * GroupElement::diagonal(s, modulus);
    }
    return GroupElement::unipotent(u, modulus) * GroupElement::weyl(modulus) * GroupElement::unipotent(u2, modulus) *
           GroupElement::diagonal(s, modulus);
  }
};

inline BruhatFactorization bruhat_decompose(const GroupElement& g) {
  const auto& m = g.modulus();
  if (g.b().is_zero()) {
    // [[a,0],[c,a^{-1}]] = u_{c/a} diag(a, a^{-1})
    const Residue a_inv = mod_inverse(g.a());
    return {BruhatFactorization::Kind::kTorusCell, (g.c() * a_inv).value(), 0, g.a().value(), m};
  }
  // u_x w u_y diag(s, s^{-1}) = [[-y s, -s^{-1}], [(1 - x y) s, -x s^{-1}]]
  const Residue b_inv = mod_inverse(g.b());
  return {BruhatFactorization::Kind::kBigCell, (g.d() * b_inv).value(), (g.a() * g.b()).value(), (-b_inv).value(),
          m};
}

namespace weil {

/// rho(u_c) f [n] = e^{2 pi i (-2^{-1} c n^2) / N} f[n].
inline Sequence chirp(std::int64_t c, const Sequence& f) {
  const auto& m = f.modulus();
  const std::int64_t k = m.mul(-m.half(), c);
  Sequence out(m);
  const double base = 2.0 * std::numbers::pi / static_cast<double>(m.n());
  for (std::int64_t n = 0; n < m.n(); ++n) {
    out.at(n) = std::polar(1.0, base * static_cast<double>(m.mul(k, m.mul(n, n)))) * f.at(n);
  }
  return out;
}

/// rho(w) f = i^{(N-1)/2} DFT(f).
inline Sequence fourier(const Sequence& f) {
  Sequence out = dft(f);
  static constexpr Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  out *= kPowersOfI[static_cast<std::size_t>(((f.n() - 1) / 2) % 4)];
  return out;
}

/// rho(diag(a, a^{-1})) f [n] = (a|N) f[a^{-1} n].
inline Sequence scaling(std::int64_t a, const Sequence& f) {
  const auto& m = f.modulus();
  const std::int64_t a_inv = inverse_mod(a, m);
  const double sign = legendre_symbol(a, m);
  Sequence out(m);
  for (std::int64_t n = 0; n < m.n(); ++n) out.at(n) = sign * f.at(m.mul(a_inv, n));
  return out;
}

}  // namespace weil

/// Applies rho(g) by composing the Bruhat factors, rightmost factor first.
inline Sequence weil_apply(const GroupElement& g, const Sequence& f) {
  require_same(g.modulus(), f.modulus());
  const BruhatFactorization bd = bruhat_decompose(g);
  Sequence out = weil::scaling(bd.s, f);
  if (bd.kind == BruhatFactorization::Kind::kBigCell) {
    out = weil::fourier(weil::chirp(bd.u2, out));
  }
  return weil::chirp(bd.u, out);
}

}  // namespace flagmf
