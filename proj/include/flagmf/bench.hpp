#pragma once

// Wall-clock timing of single-shift detection: the flag method (two line
// restrictions) against a dense scan of the whole matched-filter matrix.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "flagmf/estimator.hpp"

namespace flagmf::bench {

enum class Method { kFlag, kFull };

inline std::string method_name(Method m) { return m == Method::kFlag ? "flag" : "full"; }

/// Dense detection: argmax of |M(R, S)| over all of V.
inline TimeFreqShift full_detect(const Sequence& r, const Sequence& s) {
  const MFMatrix mf = mf_full(r, s);
  const auto& m = r.modulus();
  std::int64_t best_t = 0;
  std::int64_t best_w = 0;
  double best = -1.0;
  for (std::int64_t t = 0; t < m.n(); ++t) {
    for (std::int64_t w = 0; w < m.n(); ++w) {
      const double mag = std::abs(mf.at(t, w));
      if (mag > best) {
        best = mag;
        best_t = t;
        best_w = w;
      }
    }
  }
  return {best_t, best_w, m};
}

struct Options {
  int batches = 5;
  /// Calls are repeated inside a batch until it lasts at least this long.
  double min_batch_seconds = 0.02;
};

/// Median over batches of the per-call detection time, in seconds.
inline double time_detection(std::int64_t n, Method method, const Options& options = {}) {
  using Clock = std::chrono::steady_clock;
  const Modulus m(n);
  const FlagSequence flag = default_flag(Line::infinite(m));
  const Sequence r = heisenberg_apply({n / 2, n / 3, m}, flag.values);
  volatile std::int64_t sink = 0;
  auto once = [&] {
    const TimeFreqShift v = method == Method::kFlag ? flag_detect_single(r, flag).shift : full_detect(r, flag.values);
    sink = sink + v.tau.value();
  };
  once();

  std::vector<double> per_call;
  for (int b = 0; b < options.batches; ++b) {
    int calls = 0;
    const auto start = Clock::now();
    double elapsed = 0.0;
    do {
      once();
      ++calls;
      elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    } while (elapsed < options.min_batch_seconds);
    per_call.push_back(elapsed / calls);
  }
  std::nth_element(per_call.begin(), per_call.begin() + static_cast<std::ptrdiff_t>(per_call.size() / 2), per_call.end());
  return per_call[per_call.size() / 2];
}

/// Least-squares slope of log(seconds / log N) against log N.
inline double fit_exponent(const std::vector<std::int64_t>& sizes, const std::vector<double>& seconds) {
  const std::size_t k = sizes.size();
  if (k < 2) return std::nan("");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(static_cast<double>(sizes[i]));
    const double y = std::log(seconds[i] / x);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kd = static_cast<double>(k);
  return (kd * sxy - sx * sy) / (kd * sxx - sx * sx);
}

}  // namespace flagmf::bench
