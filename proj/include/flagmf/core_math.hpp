#pragma once

// Exact arithmetic over Z_N for an odd prime N, plus multiplicative characters.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "flagmf/errors.hpp"

namespace flagmf {

using Complex = std::complex<double>;

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod_u64(result, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1U;
  }
  return result;
}

}  // namespace detail

// Deterministic Miller-Rabin; the witness set below is exact for all 64-bit n.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = detail::powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = detail::mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// The prime N. Construction fails unless N is an odd prime >= 5.
class Modulus {
 public:
  explicit Modulus(std::int64_t n) : n_(n) {
    if (n < 5 || n % 2 == 0 || !is_prime(static_cast<std::uint64_t>(n))) {
      throw DomainError("modulus must be an odd prime >= 5, got " + std::to_string(n));
    }
  }

  std::int64_t n() const noexcept { return n_; }

  /// Canonical representative of x in [0, N-1].
  std::int64_t reduce(std::int64_t x) const noexcept {
    std::int64_t r = x % n_;
    return r < 0 ? r + n_ : r;
  }

  std::int64_t mul(std::int64_t a, std::int64_t b) const noexcept {
    return static_cast<std::int64_t>(
        detail::mulmod_u64(static_cast<std::uint64_t>(reduce(a)), static_cast<std::uint64_t>(reduce(b)),
                           static_cast<std::uint64_t>(n_)));
  }

  std::int64_t pow(std::int64_t base, std::uint64_t exp) const noexcept {
    return static_cast<std::int64_t>(
        detail::powmod_u64(static_cast<std::uint64_t>(reduce(base)), exp, static_cast<std::uint64_t>(n_)));
  }

  /// 2^{-1} = (N+1)/2.
  std::int64_t half() const noexcept { return (n_ + 1) / 2; }

  friend bool operator==(const Modulus&, const Modulus&) = default;

 private:
  std::int64_t n_;
};

inline void require_same(const Modulus& a, const Modulus& b) {
  if (a != b) {
    throw ModulusMismatch("modulus mismatch: " + std::to_string(a.n()) + " vs " + std::to_string(b.n()));
  }
}

/// An element of Z_N, always stored reduced.
class Residue {
 public:
  Residue(std::int64_t value, const Modulus& modulus) : value_(modulus.reduce(value)), modulus_(modulus) {}

  std::int64_t value() const noexcept { return value_; }
  const Modulus& modulus() const noexcept { return modulus_; }
  bool is_zero() const noexcept { return value_ == 0; }

  Residue operator+(const Residue& o) const {
    require_same(modulus_, o.modulus_);
    return {value_ + o.value_, modulus_};
  }
  Residue operator-(const Residue& o) const {
    require_same(modulus_, o.modulus_);
    return {value_ - o.value_, modulus_};
  }
  Residue operator*(const Residue& o) const {
    require_same(modulus_, o.modulus_);
    return {modulus_.mul(value_, o.value_), modulus_};
  }
  Residue operator-() const { return {-value_, modulus_}; }

  friend bool operator==(const Residue&, const Residue&) = default;

 private:
  std::int64_t value_;
  Modulus modulus_;
};

inline Residue mod_inverse(const Residue& x) {
  if (x.is_zero()) throw DomainError("no inverse of 0");
  // Fermat: x^{N-2}
  const auto& m = x.modulus();
  return {m.pow(x.value(), static_cast<std::uint64_t>(m.n() - 2)), m};
}

/// Raw-integer variant used on hot paths.
inline std::int64_t inverse_mod(std::int64_t x, const Modulus& m) { return mod_inverse(Residue(x, m)).value(); }

/// (a|N) via Euler's criterion.
inline int legendre_symbol(const Residue& a) {
  if (a.is_zero()) return 0;
  const auto& m = a.modulus();
  return m.pow(a.value(), static_cast<std::uint64_t>((m.n() - 1) / 2)) == 1 ? 1 : -1;
}

inline int legendre_symbol(std::int64_t a, const Modulus& m) { return legendre_symbol(Residue(a, m)); }

/// Smallest positive r of multiplicative order N-1.
inline Residue find_primitive_root(const Modulus& modulus) {
  const std::int64_t order = modulus.n() - 1;
  std::vector<std::int64_t> prime_factors;
  std::int64_t rest = order;
  for (std::int64_t p = 2; p * p <= rest; ++p) {
    if (rest % p == 0) {
      prime_factors.push_back(p);
      while (rest % p == 0) rest /= p;
    }
  }
  if (rest > 1) prime_factors.push_back(rest);

  for (std::int64_t r = 2; r < modulus.n(); ++r) {
    bool primitive = true;
    for (std::int64_t p : prime_factors) {
      if (modulus.pow(r, static_cast<std::uint64_t>(order / p)) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) return {r, modulus};
  }
  throw DomainError("no primitive root found");  // unreachable for prime N
}

/// Full discrete-log table for a primitive root: O(N) memory, O(1) lookups.
class DiscreteLogTable {
 public:
  DiscreteLogTable(const Residue& base)
      : base_(base), log_(static_cast<std::size_t>(base.modulus().n()), -1) {
    const auto& m = base.modulus();
    std::int64_t x = 1;
    for (std::int64_t d = 0; d < m.n() - 1; ++d) {
      if (log_[static_cast<std::size_t>(x)] != -1) {
        throw DomainError("discrete log base " + std::to_string(base.value()) + " is not a primitive root");
      }
      log_[static_cast<std::size_t>(x)] = d;
      x = m.mul(x, base.value());
    }
  }

  const Residue& base() const noexcept { return base_; }
  const Modulus& modulus() const noexcept { return base_.modulus(); }

  std::int64_t log(std::int64_t x) const {
    const std::int64_t r = modulus().reduce(x);
    if (r == 0) throw DomainError("discrete log of 0 is undefined");
    return log_[static_cast<std::size_t>(r)];
  }

 private:
  Residue base_;
  std::vector<std::int64_t> log_;
};

inline std::int64_t discrete_log(const Residue& base, const Residue& x) {
  require_same(base.modulus(), x.modulus());
  if (x.is_zero()) throw DomainError("discrete log of 0 is undefined");
  return DiscreteLogTable(base).log(x.value());
}

/// chi_zeta(r^d) = zeta^d with zeta = exp(2 pi i k / (N-1)).
class MultiplicativeCharacter {
 public:
  MultiplicativeCharacter(const Modulus& modulus, std::int64_t zeta_index)
      : MultiplicativeCharacter(std::make_shared<const DiscreteLogTable>(find_primitive_root(modulus)),
                                zeta_index) {}

  MultiplicativeCharacter(std::shared_ptr<const DiscreteLogTable> logs, std::int64_t zeta_index)
      : logs_(std::move(logs)), zeta_index_(zeta_index) {
    const std::int64_t order = logs_->modulus().n() - 1;
    if (zeta_index < 0 || zeta_index >= order) {
      throw DomainError("zeta index must lie in [0, " + std::to_string(order - 1) + "], got " +
                        std::to_string(zeta_index));
    }
  }

  const Modulus& modulus() const noexcept { return logs_->modulus(); }
  const Residue& generator() const noexcept { return logs_->base(); }
  std::int64_t zeta_index() const noexcept { return zeta_index_; }
  const std::shared_ptr<const DiscreteLogTable>& log_table() const noexcept { return logs_; }

  /// The order-2 character, i.e. the Legendre symbol on Z_N^*.
  bool is_quadratic() const noexcept { return zeta_index_ == (modulus().n() - 1) / 2; }
  bool is_trivial() const noexcept { return zeta_index_ == 0; }

  Complex operator()(std::int64_t x) const {
    const std::int64_t order = modulus().n() - 1;
    const std::int64_t d = logs_->log(x);  // throws on 0
    const std::int64_t k = static_cast<std::int64_t>(
        (static_cast<__int128>(zeta_index_) * d) % order);
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(order));
  }

 private:
  std::shared_ptr<const DiscreteLogTable> logs_;
  std::int64_t zeta_index_;
};

inline Complex character_eval(const MultiplicativeCharacter& chi, const Residue& x) {
  require_same(chi.modulus(), x.modulus());
  if (x.is_zero()) throw DomainError("multiplicative characters are defined on nonzero residues only");
  return chi(x.value());
}

/// Table of N-th roots of unity: at(k) = exp(2 pi i k / N) for any integer k.
class UnitRoots {
 public:
  explicit UnitRoots(const Modulus& m) : modulus_(m), roots_(static_cast<std::size_t>(m.n())) {
    const double n = static_cast<double>(m.n());
    for (std::size_t k = 0; k < roots_.size(); ++k) {
      roots_[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / n);
    }
  }
  Complex at(std::int64_t k) const noexcept { return roots_[static_cast<std::size_t>(modulus_.reduce(k))]; }
  const Modulus& modulus() const noexcept { return modulus_; }

 private:
  Modulus modulus_;
  std::vector<Complex> roots_;
};

}  // namespace flagmf
