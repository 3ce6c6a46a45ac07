#pragma once

#include <cstdint>

#include "microlimit/common.hpp"
#include "microlimit/rng.hpp"

namespace microlimit {

inline constexpr int kMaxResamples = 5;

/// Calls fn(seed); on DegenerateSample retries with derived seeds, at most
/// kMaxResamples times, then rethrows.
template <class Fn>
auto with_resample(std::uint64_t seed, Fn&& fn) {
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t s = attempt == 0 ? seed : derive_seed(seed, 0x5e5a11ULL, attempt);
    try {
      return fn(s);
    } catch (const DegenerateSample& e) {
      if (attempt >= kMaxResamples)
        throw DegenerateSample(std::string("resampling exhausted after 5 attempts: ") + e.what());
    }
  }
}

}  // namespace microlimit
