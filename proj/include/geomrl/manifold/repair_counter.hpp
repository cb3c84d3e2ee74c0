#pragma once

#include <cstdint>

namespace geomrl {

/// Per-thread count of calls into the repairing projections
/// (s3_canonicalize and nearest_spd). Callers measure deltas around the code
/// they want to audit.
inline std::uint64_t& repair_calls() {
  thread_local std::uint64_t n = 0;
  return n;
}

}  // namespace geomrl
