#include "outage/bisection.hpp"

#include <map>
#include <stdexcept>

namespace outage {

BisectionResult bisect_max_feasible(int lo, int hi, const std::function<bool(int)>& probe) {
  if (hi < lo) throw std::invalid_argument("bisect_max_feasible: empty range");
  BisectionResult result;
  auto fresh = [&](int n) {
    ++result.probes;
    return probe(n);
  };
  std::map<int, bool> cache;
  auto ask = [&](int n) {
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    return cache.emplace(n, fresh(n)).first->second;
  };

  // ask(good) is true or good == lo; ask(bad) is false or bad == hi + 1.
  int good = lo;
  int bad = hi + 1;
  if (ask(hi)) {
    good = hi;
  } else {
    bad = hi;
    while (bad - good > 1) {
      const int mid = good + (bad - good) / 2;
      if (ask(mid)) {
        good = mid;
      } else {
        bad = mid;
      }
    }
  }

  // Verification re-probes without the cache.
  const bool good_ok = (good == lo && !ask(lo)) || fresh(good);
  const bool next_ok = good + 1 > hi || !fresh(good + 1);
  if (good_ok && next_ok) {
    result.value = good;
    return result;
  }

  result.used_fallback = true;
  result.value = lo;
  for (int n = hi; n > lo; --n) {
    if (fresh(n)) {
      result.value = n;
      break;
    }
  }
  return result;
}

}  // namespace outage
