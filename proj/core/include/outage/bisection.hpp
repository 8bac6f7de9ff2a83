#pragma once

#include <functional>

namespace outage {

struct BisectionResult {
  int value = 0;
  bool used_fallback = false;  // the probe was not monotone; a descending scan decided
  int probes = 0;
};

/// Largest n in [lo, hi] with probe(n) true, assuming probe is true below a
/// frontier and false above it. The bisection answer is verified
/// (probe(n) && !probe(n + 1)); if that fails, a descending linear scan from
/// `hi` decides instead. Returns `lo` when nothing in range is feasible.
BisectionResult bisect_max_feasible(int lo, int hi, const std::function<bool(int)>& probe);

}  // namespace outage
