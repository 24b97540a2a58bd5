#include "ramify/herbrand.hpp"

#include "ramify/error.hpp"

namespace ramify {

namespace {

void require_prime(long p) {
  if (!is_prime(p)) {
    throw malformed("non-prime-p", "p=" + std::to_string(p) + " is not prime", "p");
  }
}

}  // namespace

PLFunc psi_step(long lower_break, long p) {
  require_prime(p);
  if (lower_break < 1) {
    throw malformed("non-positive-break",
                    "break must be >= 1, got " + std::to_string(lower_break),
                    "break");
  }
  const Rat i(lower_break);
  return PLFunc({{i, i}}, {Rat(1), Rat(p)});
}

TowerPsi tower_psi(std::span<const long> relative_lower_breaks, long p) {
  require_prime(p);
  if (relative_lower_breaks.empty()) {
    throw malformed("empty-tower", "tower needs at least one step", "breaks");
  }
  TowerPsi out;
  for (std::size_t k = 0; k < relative_lower_breaks.size(); ++k) {
    const long t = relative_lower_breaks[k];
    if (t < 1) {
      throw malformed("non-positive-break", "break must be >= 1",
                      "breaks[" + std::to_string(k) + "]");
    }
    Rat u = invert(out.psi)(Rat(t));
    if (!out.upper.empty() && u <= out.upper.back()) {
      throw infeasible("non-increasing-filtration",
                       "upper break " + u.str() + " of step " + std::to_string(k + 1) +
                           " does not exceed " + out.upper.back().str(),
                       "breaks[" + std::to_string(k) + "]");
    }
    out.psi = compose(psi_step(t, p), out.psi);
    out.upper.push_back(std::move(u));
  }
  return out;
}

}  // namespace ramify
