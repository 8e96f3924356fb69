#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "flagmf/operators.hpp"

namespace flagmf {

struct Path {
  Complex alpha;
  TimeFreqShift shift;
};

/// Sparse channel: m paths (alpha_k, tau_k, omega_k).
struct ChannelParams {
  std::vector<Path> paths;

  std::size_t sparsity() const noexcept { return paths.size(); }

  double energy() const {
    double e = 0.0;
    for (const auto& p : paths) e += std::norm(p.alpha);
    return e;
  }

  bool shifts_distinct() const {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      for (std::size_t j = i + 1; j < paths.size(); ++j) {
        if (paths[i].shift == paths[j].shift) return false;
      }
    }
    return true;
  }

  /// Throws DomainError on repeated shifts or, unless allowed, energy above 1.
  void validate(bool allow_energy_overflow = false) const {
    if (!shifts_distinct()) throw DomainError("channel paths must have pairwise distinct shifts");
    if (!allow_energy_overflow && energy() > 1.0 + 1e-12) {
      throw DomainError("channel energy " + std::to_string(energy()) + " exceeds 1");
    }
  }
};

}  // namespace flagmf
