#pragma once

// The matched filter M(R, S)[tau, omega] = <R, pi(tau, omega) S>: dense oracle
// and O(N log N) restriction to shifted lines.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "flagmf/core_math.hpp"
#include "flagmf/operators.hpp"
#include "flagmf/sequences.hpp"

namespace flagmf {

/// Dense N x N matched-filter matrix indexed by (tau, omega).
class MFMatrix {
 public:
  explicit MFMatrix(const Modulus& m)
      : modulus_(m), entries_(static_cast<std::size_t>(m.n() * m.n()), Complex{}) {}

  const Modulus& modulus() const noexcept { return modulus_; }
  Complex& at(std::int64_t tau, std::int64_t omega) { return entries_[index(tau, omega)]; }
  Complex at(std::int64_t tau, std::int64_t omega) const { return entries_[index(tau, omega)]; }
  Complex at(const TimeFreqShift& v) const { return at(v.tau.value(), v.omega.value()); }

 private:
  std::size_t index(std::int64_t tau, std::int64_t omega) const {
    return static_cast<std::size_t>(modulus_.reduce(tau) * modulus_.n() + modulus_.reduce(omega));
  }

  Modulus modulus_;
  std::vector<Complex> entries_;
};

/// Single entry, O(N).
inline Complex mf_at(const Sequence& r, const Sequence& s, const TimeFreqShift& v) {
  require_same(r.modulus(), s.modulus());
  require_same(r.modulus(), v.modulus());
  const auto& m = r.modulus();
  const UnitRoots roots(m);
  const std::int64_t tau = v.tau.value();
  const std::int64_t omega = v.omega.value();
  Complex acc{};
  for (std::int64_t n = 0; n < m.n(); ++n) acc += r.at(n) * std::conj(roots.at(m.mul(omega, n)) * s.at(n + tau));
  return acc;
}

/// Brute-force O(N^3) evaluation.
inline MFMatrix mf_full(const Sequence& r, const Sequence& s) {
  require_same(r.modulus(), s.modulus());
  const auto& m = r.modulus();
  const UnitRoots roots(m);
  MFMatrix out(m);
  std::vector<Complex> product(static_cast<std::size_t>(m.n()));
  for (std::int64_t tau = 0; tau < m.n(); ++tau) {
    for (std::int64_t n = 0; n < m.n(); ++n) product[static_cast<std::size_t>(n)] = r.at(n) * std::conj(s.at(n + tau));
    for (std::int64_t omega = 0; omega < m.n(); ++omega) {
      Complex acc{};
      std::int64_t phase = 0;  // omega * n mod N, stepped
      for (std::int64_t n = 0; n < m.n(); ++n) {
        acc += product[static_cast<std::size_t>(n)] * std::conj(roots.at(phase));
        phase += omega;
        if (phase >= m.n()) phase -= m.n();
      }
      out.at(tau, omega) = acc;
    }
  }
  return out;
}

/// Offset of the same shifted line in transversal form: (0, omega - c tau) for
/// slope c, (tau, 0) for L_inf.
inline TimeFreqShift canonicalize_offset(const Line& line, const TimeFreqShift& v) {
  require_same(line.modulus(), v.modulus());
  const auto& m = line.modulus();
  if (line.is_infinite()) return {v.tau.value(), 0, m};
  return {0, v.omega.value() - m.mul(line.slope(), v.tau.value()), m};
}

/// Matched filter sampled along base_line + offset; samples[t] sits at point(t).
struct LineRestriction {
  Line base_line;
  TimeFreqShift offset;  // canonical
  std::vector<Complex> samples;

  TimeFreqShift point(std::int64_t t) const { return base_line.point(t) + offset; }
};

/// O(N log N) restriction of M(R, S) to base_line + offset.
///
/// Slope c, offset (0, w0): M[tau (1,c) + (0,w0)] = e^{2 pi i 2^{-1} c tau^2 / N} (a_- * b)[tau]
/// with a[n] = R[n] e^{2 pi i (2^{-1} c n^2 - w0 n) / N}, b[n] = conj(S[n]) e^{-2 pi i 2^{-1} c n^2 / N}.
/// L_inf, offset (t0, 0): M[(t0, w)] = sqrt(N) DFT(R conj(S_{t0}))[w].
inline LineRestriction mf_on_line(const Sequence& r, const Sequence& s, const Line& line,
                                  const TimeFreqShift& offset) {
  require_same(r.modulus(), s.modulus());
  require_same(r.modulus(), line.modulus());
  const auto& m = r.modulus();
  const TimeFreqShift canon = canonicalize_offset(line, offset);
  const UnitRoots roots(m);
  std::vector<Complex> samples(static_cast<std::size_t>(m.n()));

  if (line.is_infinite()) {
    const std::int64_t t0 = canon.tau.value();
    Sequence prod(m);
    for (std::int64_t n = 0; n < m.n(); ++n) prod.at(n) = r.at(n) * std::conj(s.at(n + t0));
    const Sequence spectrum = dft(prod);
    const double scale = std::sqrt(static_cast<double>(m.n()));
    for (std::size_t w = 0; w < samples.size(); ++w) samples[w] = scale * spectrum[w];
    return {line, canon, std::move(samples)};
  }

  const std::int64_t c = line.slope();
  const std::int64_t w0 = canon.omega.value();
  const std::int64_t half_c = m.mul(m.half(), c);
  Sequence reflected(m);  // reflected[k] = a[-k]
  Sequence b(m);
  for (std::int64_t n = 0; n < m.n(); ++n) {
    const std::int64_t sq = m.mul(half_c, m.mul(n, n));
    reflected.at(-n) = r.at(n) * roots.at(sq - m.mul(w0, n));
    b.at(n) = std::conj(s.at(n)) * roots.at(-sq);
  }
  const Sequence conv = fast_convolve(reflected, b);
  for (std::int64_t t = 0; t < m.n(); ++t) {
    samples[static_cast<std::size_t>(t)] = roots.at(m.mul(half_c, m.mul(t, t))) * conv.at(t);
  }
  return {line, canon, std::move(samples)};
}

inline LineRestriction mf_on_line(const Sequence& r, const Sequence& s, const Line& line) {
  return mf_on_line(r, s, line, TimeFreqShift(0, 0, line.modulus()));
}

}  // namespace flagmf
