#pragma once

// Heisenberg (line) bases, Weil (spike) sequences for split tori, and flags.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "flagmf/core_math.hpp"
#include "flagmf/operators.hpp"

namespace flagmf {

/// A line through the origin of V: span{(1, c)} or, for infinite slope, span{(0, 1)}.
class Line {
 public:
  static Line finite(std::int64_t slope, const Modulus& m) { return Line(m.reduce(slope), m); }
  static Line infinite(const Modulus& m) { return Line(std::nullopt, m); }

  bool is_infinite() const noexcept { return !slope_.has_value(); }
  /// Finite slope c; throws for L_inf.
  std::int64_t slope() const {
    if (!slope_) throw DomainError("line of infinite slope has no finite slope");
    return *slope_;
  }
  const Modulus& modulus() const noexcept { return modulus_; }

  /// t-th point: t (1, c) for finite slope, t (0, 1) for L_inf.
  TimeFreqShift point(std::int64_t t) const {
    if (slope_) return {t, modulus_.mul(t, *slope_), modulus_};
    return {0, t, modulus_};
  }

  bool contains(const TimeFreqShift& v) const {
    require_same(modulus_, v.modulus());
    if (slope_) return v.omega.value() == modulus_.mul(*slope_, v.tau.value());
    return v.tau.is_zero();
  }

  std::vector<TimeFreqShift> points() const {
    std::vector<TimeFreqShift> out;
    out.reserve(static_cast<std::size_t>(modulus_.n()));
    for (std::int64_t t = 0; t < modulus_.n(); ++t) out.push_back(point(t));
    return out;
  }

  std::string name() const { return slope_ ? "L_" + std::to_string(*slope_) : std::string("L_inf"); }

  friend bool operator==(const Line&, const Line&) = default;

 private:
  Line(std::optional<std::int64_t> slope, const Modulus& m) : slope_(slope), modulus_(m) {}

  std::optional<std::int64_t> slope_;
  Modulus modulus_;
};

/// N finite-slope lines in slope order, then L_inf.
inline std::vector<Line> enumerate_lines(const Modulus& m) {
  std::vector<Line> lines;
  lines.reserve(static_cast<std::size_t>(m.n() + 1));
  for (std::int64_t c = 0; c < m.n(); ++c) lines.push_back(Line::finite(c, m));
  lines.push_back(Line::infinite(m));
  return lines;
}

/// The split torus T_g = g A g^{-1} for g = [[1, b], [c, 1 + bc]].
class SplitTorus {
 public:
  SplitTorus(std::int64_t b, std::int64_t c, const Modulus& m) : b_(b, m), c_(c, m) {}
  static SplitTorus diagonal(const Modulus& m) { return {0, 0, m}; }

  const Residue& b() const noexcept { return b_; }
  const Residue& c() const noexcept { return c_; }
  const Modulus& modulus() const noexcept { return b_.modulus(); }

  GroupElement conjugator() const {
    const auto& m = modulus();
    return {1, b_.value(), c_.value(), (Residue(1, m) + b_ * c_).value(), m};
  }

  /// g diag(a, a^{-1}) g^{-1}.
  GroupElement element(std::int64_t a) const {
    const GroupElement g = conjugator();
    return g * GroupElement::diagonal(a, modulus()) * g.inverse();
  }

  /// The other (Par) parameter pair naming the same subgroup, when b != 0.
  std::optional<SplitTorus> twin() const {
    if (b_.is_zero()) return std::nullopt;
    const Residue c2 = (Residue(1, modulus()) + b_ * c_) * mod_inverse(b_);
    return SplitTorus((-b_).value(), c2.value(), modulus());
  }

  friend bool operator==(const SplitTorus&, const SplitTorus&) = default;

 private:
  Residue b_, c_;
};

/// All N(N+1)/2 split tori, one (Par) representative each: b = 0 with every c,
/// and b in [1, (N-1)/2] with every c (the twin of such a pair has b in the upper half).
inline std::vector<SplitTorus> enumerate_split_tori(const Modulus& m) {
  std::vector<SplitTorus> tori;
  tori.reserve(static_cast<std::size_t>(m.n() * (m.n() + 1) / 2));
  for (std::int64_t b = 0; b <= (m.n() - 1) / 2; ++b) {
    for (std::int64_t c = 0; c < m.n(); ++c) tori.emplace_back(b, c, m);
  }
  return tori;
}

/// f_{c,b}[n] = N^{-1/2} e^{2 pi i (-2^{-1} c n^2 + b n) / N}, or delta_b on L_inf.
inline Sequence heisenberg_basis_sequence(const Line& line, std::int64_t index) {
  const auto& m = line.modulus();
  if (line.is_infinite()) return Sequence::delta(m, index);
  const std::int64_t quad = m.mul(-m.half(), line.slope());
  const double base = 2.0 * std::numbers::pi / static_cast<double>(m.n());
  const double amp = 1.0 / std::sqrt(static_cast<double>(m.n()));
  Sequence f(m);
  for (std::int64_t n = 0; n < m.n(); ++n) {
    const std::int64_t phase = m.reduce(m.mul(quad, m.mul(n, n)) + m.mul(index, n));
    f.at(n) = std::polar(amp, base * static_cast<double>(phase));
  }
  return f;
}

/// psi(u) with pi(u) f = psi(u) f for the basis element f of the given index and u on the line.
inline Complex heisenberg_eigenvalue(const Line& line, std::int64_t index, const TimeFreqShift& u) {
  if (!line.contains(u)) throw DomainError("shift does not lie on " + line.name());
  const auto& m = line.modulus();
  std::int64_t phase = 0;
  if (line.is_infinite()) {
    phase = m.mul(u.omega.value(), index);
  } else {
    const std::int64_t t = u.tau.value();
    phase = m.reduce(m.mul(m.mul(-m.half(), line.slope()), m.mul(t, t)) + m.mul(index, t));
  }
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(m.n()));
}

inline MultiplicativeCharacter default_character(const Modulus& m) { return {m, 1}; }

namespace detail {

inline Sequence diagonal_torus_sequence(const MultiplicativeCharacter& chi) {
  const auto& m = chi.modulus();
  const double amp = 1.0 / std::sqrt(static_cast<double>(m.n() - 1));
  Sequence phi(m);
  for (std::int64_t n = 1; n < m.n(); ++n) phi.at(n) = amp * chi(n);
  return phi;
}

}  // namespace detail

/// Eigensequence of the Weil operators of a split torus for the character chi.
///
/// b = c = 0 gives the diagonal-torus sequence chi(n)/sqrt(N-1) (zero at n = 0);
/// b = 0 multiplies it by the chirp e^{-2 pi i 2^{-1} c n^2 / N}; b != 0 uses
///   phi[n] = C_b e^{-2 pi i 2^{-1} ((1+bc)/b) n^2 / N} IDFT(h)[n],
///   h[w] = e^{-2 pi i 2^{-1} b w^2 / N} phi_A[b w],  C_b = i^{-(N-1)/2} (b|N),
/// which is rho(g) phi_A for g = [[1,b],[c,1+bc]].
///
/// The quadratic character is rejected. The trivial character (index 0) is a
/// valid formula evaluation but lies in the quadratic eigenspace of the torus,
/// so its ambiguity surface is not a spike.
inline Sequence weil_sequence(const SplitTorus& torus, const MultiplicativeCharacter& chi) {
  require_same(torus.modulus(), chi.modulus());
  if (chi.is_quadratic()) {
    throw DomainError("the quadratic character (zeta index " + std::to_string(chi.zeta_index()) +
                      ") is excluded from Weil spike sequences");
  }
  const auto& m = chi.modulus();
  const Sequence phi_a = detail::diagonal_torus_sequence(chi);
  if (torus.b().is_zero()) {
    return torus.c().is_zero() ? phi_a : weil::chirp(torus.c().value(), phi_a);
  }

  const std::int64_t b = torus.b().value();
  Sequence h(m);
  for (std::int64_t w = 0; w < m.n(); ++w) h.at(w) = phi_a.at(m.mul(b, w));
  h = weil::chirp(b, h);
  Sequence out = inverse_dft(h);

  const std::int64_t x = (Residue(1, m) + torus.b() * torus.c()).value();
  out = weil::chirp(m.mul(x, inverse_mod(b, m)), out);
  static constexpr Complex kPowersOfMinusI[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  out *= kPowersOfMinusI[static_cast<std::size_t>(((m.n() - 1) / 2) % 4)] *
         static_cast<double>(legendre_symbol(b, m));
  return out;
}

/// S_L = f_L + phi_T, kept together with its two components.
struct FlagSequence {
  Line line;
  SplitTorus torus;
  MultiplicativeCharacter chi;
  std::int64_t heis_index;
  Sequence heisenberg_part;
  Sequence weil_part;
  Sequence values;

  const Modulus& modulus() const noexcept { return values.modulus(); }
};

inline FlagSequence flag_sequence(const Line& line, const SplitTorus& torus, const MultiplicativeCharacter& chi,
                                  std::int64_t heis_index = 0) {
  require_same(line.modulus(), torus.modulus());
  Sequence f = heisenberg_basis_sequence(line, heis_index);
  Sequence phi = weil_sequence(torus, chi);
  Sequence sum = f + phi;
  return {line, torus, chi, line.modulus().reduce(heis_index), std::move(f), std::move(phi), std::move(sum)};
}

/// The torus paired with a line by default: A for L_inf, and for L_c the
/// conjugate of A by [[1, 0], [c, 1]]. An element of SL_2 carrying L_inf to L_c
/// carries A to this torus, so every default flag has the same surface up to a
/// change of coordinates.
inline SplitTorus default_torus(const Line& line) {
  return line.is_infinite() ? SplitTorus::diagonal(line.modulus()) : SplitTorus(0, line.slope(), line.modulus());
}

/// Flag with the default torus, character index 1 and Heisenberg index 0.
inline FlagSequence default_flag(const Line& line) {
  return flag_sequence(line, default_torus(line), default_character(line.modulus()), 0);
}

}  // namespace flagmf
