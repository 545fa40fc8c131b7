#pragma once

// Process-level tuning knobs shared by the search routines.

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace solvlab {

// Search radius cap: the SOLVLAB_MAX_RADIUS environment variable overrides
// the per-call fallback. Caps stay error-checked: searches past the cap
// still fail loudly rather than approximate.
inline int bfs_radius_cap(int fallback) {
  if (const char* s = std::getenv("SOLVLAB_MAX_RADIUS")) {
    int v = 0;
    try {
      v = std::stoi(s);
    } catch (const std::exception&) {
      throw std::invalid_argument("SOLVLAB_MAX_RADIUS: not an integer");
    }
    if (v < 0) throw std::invalid_argument("SOLVLAB_MAX_RADIUS: must be >= 0");
    return v;
  }
  return fallback;
}

}  // namespace solvlab
