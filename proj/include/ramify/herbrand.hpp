#pragma once

#include <span>
#include <vector>

#include "ramify/plfunc.hpp"

namespace ramify {

// Herbrand function psi (upper -> lower numbering) of a cyclic degree-p
// totally ramified step with lower break `lower_break`:
//   psi(x) = x                                  for x <= lower_break
//   psi(x) = p*x - (p-1)*lower_break            otherwise.
// This is the continuous form; the jump version (p-1)i + px is not a valid
// Herbrand function.
PLFunc psi_step(long lower_break, long p);

struct TowerPsi {
  PLFunc psi;               // psi of the whole tower over the base field.
  std::vector<Rat> upper;   // upper break of each step, strictly increasing.
};

// Composes the steps of a tower K = K_0 < K_1 < ... < K_n, where
// `relative_lower_breaks[k]` is the break of K_{k+1}/K_k in that step's own
// numbering:  psi_{K_{k+1}/K} = psi_step(t_{k+1}) o psi_{K_k/K}.
//
// Throws Error(infeasible, "non-increasing-filtration") when some step's
// upper break does not exceed the previous one.
TowerPsi tower_psi(std::span<const long> relative_lower_breaks, long p);

}  // namespace ramify
