#pragma once

#include "relsheaf/finspace.hpp"

// Shared fixtures. Order convention: x <= y iff every open set containing x
// contains y, so open points are maximal and U_x = {y : x <= y}.
namespace fixtures {

using relsheaf::FinSpace;

// Two points, open point o over closed point c: opens are {}, {o}, {o,c}.
inline FinSpace sierpinski() { return FinSpace::from_hasse({"o", "c"}, {{1, 0}}); }

// Four points a,b,c,d with minimal opens {a}, {b}, {a,b,c}, {a,b,d}: the
// weak-homotopy circle. Order complex is a 4-cycle.
inline FinSpace pseudocircle() {
  return FinSpace::from_hasse({"a", "b", "c", "d"}, {{2, 0}, {2, 1}, {3, 0}, {3, 1}});
}

// Open arc {a,b,c} of the pseudocircle as a mask.
inline uint64_t arc_mask() { return 0b0111; }

}  // namespace fixtures
