#pragma once

// Received-sequence synthesis for the single-shift, multipath and GPS-bit
// channel models with reproducible circular complex Gaussian noise.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "flagmf/channel_params.hpp"
#include "flagmf/operators.hpp"

namespace flagmf {

struct NoiseSpec {
  std::uint64_t seed = 0;
  double sigma = 0.0;  // per-sample std dev; sigma^2 / 2 in each of re, im
};

enum class ScenarioKind { kSingleShift, kMultipath, kGpsBit };

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kSingleShift;
  ChannelParams channel;
  int bit = 1;  // gps-bit only
  NoiseSpec noise;
  bool allow_energy_overflow = false;

  void validate() const {
    if (channel.paths.empty()) throw DomainError("scenario needs at least one path");
    if ((kind == ScenarioKind::kSingleShift || kind == ScenarioKind::kGpsBit) && channel.paths.size() != 1) {
      throw DomainError("single-shift and gps-bit scenarios take exactly one path");
    }
    if (kind == ScenarioKind::kGpsBit && bit != 1 && bit != -1) throw DomainError("bit must be +1 or -1");
    if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) throw DomainError("sigma must be finite and >= 0");
    channel.validate(allow_energy_overflow);
  }
};

/// Standard normal variates from std::mt19937_64 through Box-Muller on 53-bit
/// uniforms. The engine's output is fixed by the C++ standard, so a seed yields
/// the same stream on every conforming platform.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1].
  double uniform() { return (static_cast<double>(engine_() >> 11U) + 1.0) * 0x1.0p-53; }

  /// A pair of independent N(0, 1) draws.
  std::pair<double, double> pair() {
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<Complex> complex_noise(const NoiseSpec& spec, std::size_t length) {
  std::vector<Complex> w(length, Complex{});
  if (spec.sigma == 0.0) return w;
  GaussianSource source(spec.seed);
  const double s = spec.sigma / std::numbers::sqrt2;
  for (auto& v : w) {
    const auto [re, im] = source.pair();
    v = {s * re, s * im};
  }
  return w;
}

/// The noiseless part: (b) sum_k alpha_k pi(tau_k, omega_k) S.
inline Sequence channel_response(const Sequence& s, const ChannelParams& channel, int bit = 1) {
  Sequence r(s.modulus());
  for (const auto& p : channel.paths) r += p.alpha * heisenberg_apply(p.shift, s);
  if (bit != 1) r *= static_cast<double>(bit);
  return r;
}

inline Sequence synthesize(const Sequence& s, const ScenarioConfig& config) {
  config.validate();
  Sequence r = channel_response(s, config.channel, config.kind == ScenarioKind::kGpsBit ? config.bit : 1);
  const auto noise = complex_noise(config.noise, r.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += noise[i];
  return r;
}

/// 10 log10(sum |alpha_k|^2 ||s||^2 / (N sigma^2)); +inf when sigma = 0.
inline double snr_report(const Sequence& s, const ScenarioConfig& config) {
  if (config.noise.sigma == 0.0) return std::numeric_limits<double>::infinity();
  const double signal = config.channel.energy() * s.norm_squared();
  const double noise = static_cast<double>(s.n()) * config.noise.sigma * config.noise.sigma;
  return 10.0 * std::log10(signal / noise);
}

/// Inverse of snr_report.
inline double sigma_for_snr(const Sequence& s, const ChannelParams& channel, double snr_db) {
  const double signal = channel.energy() * s.norm_squared();
  return std::sqrt(signal / (static_cast<double>(s.n()) * std::pow(10.0, snr_db / 10.0)));
}

}  // namespace flagmf
