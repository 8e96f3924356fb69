#pragma once

// The flag algorithm: a transversal scan finds the shifted line(s) L + v_k, a
// scan along each shifted line finds the peak v_k, and alpha_k ~ M(R, S_L)[v_k] / 2.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flagmf/channel_params.hpp"
#include "flagmf/matched_filter.hpp"
#include "flagmf/sequences.hpp"

namespace flagmf {

struct EstimatorOptions {
  /// A transversal sample at or above this magnitude marks a shifted line.
  double theta_line = 0.5;
  /// Defaults to floor(sqrt(N)).
  std::optional<std::size_t> max_paths;
  /// When the sparsity is known, take exactly this many transversal maxima.
  std::optional<std::size_t> known_paths;
  /// Invoked once per line restriction computed.
  std::function<void(const Line&, const TimeFreqShift&)> on_line_restriction;

  std::size_t resolved_max_paths(const Modulus& m) const {
    return max_paths.value_or(static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m.n())))));
  }
  /// Residual level that counts as a second path on a shifted line.
  double genericity_threshold(const Modulus& m) const {
    return std::max(theta_line, 6.0 / std::sqrt(static_cast<double>(m.n())));
  }
};

struct TransversalPeak {
  std::int64_t t;
  double magnitude;
};

struct LinePeak {
  TimeFreqShift offset;  // canonical offset of the shifted line
  std::int64_t t;
  double magnitude;
};

struct EstimationReport {
  ChannelParams estimated;
  Line flag_line;
  Line transversal;
  std::vector<TransversalPeak> transversal_peaks;
  std::vector<LinePeak> per_line_peaks;
  std::vector<double> transversal_magnitudes;
  std::vector<std::vector<double>> line_magnitudes;
  std::vector<double> residual_maxima;  // per shifted line, after removing the single-path model
  double theta_line = 0.0;
  double genericity_threshold = 0.0;
  std::size_t max_paths = 0;
  bool genericity_ok = true;
};

struct Detection {
  TimeFreqShift shift;
  Complex value;  // raw M(R, S_L) at the shift
};

/// A line meeting every shift of the input line exactly once.
inline Line choose_transversal(const Line& line) {
  return line.is_infinite() ? Line::finite(0, line.modulus()) : Line::infinite(line.modulus());
}

/// True iff all shifts lie on pairwise distinct translates of the line.
inline bool check_genericity(const ChannelParams& params, const Line& line) {
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const auto& p : params.paths) {
    const TimeFreqShift key = canonicalize_offset(line, p.shift);
    if (!seen.emplace(key.tau.value(), key.omega.value()).second) return false;
  }
  return true;
}

namespace detail {

/// Index of the largest magnitude; smallest index on ties.
inline std::size_t argmax_abs(const std::vector<Complex>& v) {
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > best_mag) {
      best_mag = mag;
      best = i;
    }
  }
  return best;
}

inline LineRestriction restrict(const Sequence& r, const FlagSequence& flag, const Line& line,
                                const TimeFreqShift& offset, const EstimatorOptions& options) {
  if (options.on_line_restriction) options.on_line_restriction(line, offset);
  return mf_on_line(r, flag.values, line, offset);
}

inline std::vector<double> magnitudes(const std::vector<Complex>& v) {
  std::vector<double> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](const Complex& z) { return std::abs(z); });
  return out;
}

/// Largest |sample - model| along a shifted line once a single path with
/// amplitude alpha at `peak` is accounted for. The model is
///   alpha (<pi(peak) f_L, pi(peak + u) f_L> + [u = 0])
///   = alpha (e^{2 pi i omega_u tau_peak / N} conj(psi(u)) + [u = 0]).
inline double single_path_residual(const LineRestriction& restriction, const FlagSequence& flag,
                                   const TimeFreqShift& peak, Complex alpha) {
  const auto& m = flag.modulus();
  const UnitRoots roots(m);
  double worst = 0.0;
  for (std::int64_t t = 0; t < m.n(); ++t) {
    const TimeFreqShift v = restriction.point(t);
    const TimeFreqShift u = v - peak;
    Complex model = alpha * roots.at(m.mul(u.omega.value(), peak.tau.value())) *
                    std::conj(heisenberg_eigenvalue(flag.line, flag.heis_index, u));
    if (u.tau.is_zero() && u.omega.is_zero()) model += alpha;
    worst = std::max(worst, std::abs(restriction.samples[static_cast<std::size_t>(t)] - model));
  }
  return worst;
}

}  // namespace detail

/// Single time-frequency shift recovery with two line restrictions.
inline Detection flag_detect_single(const Sequence& r, const FlagSequence& flag,
                                    const EstimatorOptions& options = {}) {
  require_same(r.modulus(), flag.modulus());
  const auto& m = r.modulus();
  const Line transversal = choose_transversal(flag.line);
  const LineRestriction scan = detail::restrict(r, flag, transversal, TimeFreqShift(0, 0, m), options);
  const std::size_t t_line = detail::argmax_abs(scan.samples);
  if (std::abs(scan.samples[t_line]) < options.theta_line) {
    throw DetectionError(DetectionError::Kind::kNoLine, "no line detected: transversal maximum " +
                                                           std::to_string(std::abs(scan.samples[t_line])) +
                                                           " below threshold " + std::to_string(options.theta_line));
  }
  const LineRestriction line = detail::restrict(r, flag, flag.line, scan.point(static_cast<std::int64_t>(t_line)), options);
  const std::size_t t_peak = detail::argmax_abs(line.samples);
  if (std::abs(line.samples[t_peak]) < options.theta_line) {
    throw DetectionError(DetectionError::Kind::kNoPeak, "no peak detected on " + flag.line.name());
  }
  return {line.point(static_cast<std::int64_t>(t_peak)), line.samples[t_peak]};
}

/// Multipath estimation with m + 1 line restrictions.
inline EstimationReport estimate_channel(const Sequence& r, const FlagSequence& flag,
                                         const EstimatorOptions& options = {}) {
  require_same(r.modulus(), flag.modulus());
  const auto& m = r.modulus();
  EstimationReport report{.estimated = {},
                          .flag_line = flag.line,
                          .transversal = choose_transversal(flag.line),
                          .theta_line = options.theta_line,
                          .genericity_threshold = options.genericity_threshold(m),
                          .max_paths = options.resolved_max_paths(m)};

  const LineRestriction scan = detail::restrict(r, flag, report.transversal, TimeFreqShift(0, 0, m), options);
  report.transversal_magnitudes = detail::magnitudes(scan.samples);

  std::vector<TransversalPeak> candidates;
  for (std::size_t t = 0; t < scan.samples.size(); ++t) {
    candidates.push_back({static_cast<std::int64_t>(t), report.transversal_magnitudes[t]});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const TransversalPeak& a, const TransversalPeak& b) { return a.magnitude > b.magnitude; });
  if (options.known_paths) {
    candidates.resize(std::min(candidates.size(), *options.known_paths));
  } else {
    std::erase_if(candidates, [&](const TransversalPeak& p) { return p.magnitude < options.theta_line; });
    if (candidates.empty()) {
      throw DetectionError(DetectionError::Kind::kNoLine, "no line detected on transversal " +
                                                             report.transversal.name());
    }
    if (candidates.size() > report.max_paths) {
      throw DetectionError(DetectionError::Kind::kSparsityExceeded,
                           "sparsity exceeded: " + std::to_string(candidates.size()) +
                               " transversal peaks above threshold, max_paths = " +
                               std::to_string(report.max_paths));
    }
  }
  report.transversal_peaks = candidates;

  for (const auto& cand : candidates) {
    const LineRestriction line = detail::restrict(r, flag, flag.line, scan.point(cand.t), options);
    const std::size_t t_peak = detail::argmax_abs(line.samples);
    const TimeFreqShift shift = line.point(static_cast<std::int64_t>(t_peak));
    const Complex alpha = line.samples[t_peak] / 2.0;
    report.estimated.paths.push_back({alpha, shift});
    report.per_line_peaks.push_back({line.offset, static_cast<std::int64_t>(t_peak), std::abs(line.samples[t_peak])});
    report.line_magnitudes.push_back(detail::magnitudes(line.samples));
    const double residual = detail::single_path_residual(line, flag, shift, alpha);
    report.residual_maxima.push_back(residual);
    if (residual > report.genericity_threshold) report.genericity_ok = false;
  }
  return report;
}

/// Sign of Re<R, sum_k alpha_k pi(tau_k, omega_k) S> / sum_k |alpha_k|^2.
inline int extract_bit(const Sequence& r, const FlagSequence& flag, const ChannelParams& known) {
  require_same(r.modulus(), flag.modulus());
  const double energy = known.energy();
  if (!(energy > 0.0)) throw DomainError("bit extraction needs nonzero channel energy");
  Complex rake{};
  for (const auto& p : known.paths) rake += std::conj(p.alpha) * mf_at(r, flag.values, p.shift);
  return (rake.real() / energy) >= 0.0 ? 1 : -1;
}

}  // namespace flagmf
