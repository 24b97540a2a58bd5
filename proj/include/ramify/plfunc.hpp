#pragma once

#include <span>
#include <vector>

#include "ramify/rational.hpp"

namespace ramify {

struct Breakpoint {
  Rat x;
  Rat y;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

// Exact continuous, strictly increasing, piecewise-linear function on
// [0, inf) with f(0) = 0.
//
// `slopes()` has one more entry than `breakpoints()`: slopes()[0] applies on
// [0, x_0], slopes()[k] on [x_{k-1}, x_k], and the last slope continues
// indefinitely. The representation is normalized (no breakpoint joins two
// segments of equal slope), so operator== is equality of functions.
class PLFunc {
 public:
  // The identity x -> x.
  PLFunc();

  // Validates continuity data and normalizes. Throws malformed_input on
  // non-increasing x, non-positive slopes or a break in continuity.
  PLFunc(std::vector<Breakpoint> breakpoints, std::vector<Rat> slopes);

  static PLFunc identity() { return {}; }

  // Builds the function through the origin and the given sample abscissae.
  // `xs` must be strictly increasing and positive; `f` is sampled at each of
  // them and one unit past the last one to fix the final slope.
  template <typename F>
  static PLFunc from_samples(std::span<const Rat> xs, F&& f);

  const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
  const std::vector<Rat>& slopes() const { return slopes_; }
  const Rat& initial_slope() const { return slopes_.front(); }
  const Rat& final_slope() const { return slopes_.back(); }

  // Exact value; throws malformed_input for x < 0.
  Rat operator()(const Rat& x) const;

  // Slope of the segment containing x, taking the right-hand segment at a
  // breakpoint.
  const Rat& slope_right_of(const Rat& x) const;

  friend bool operator==(const PLFunc&, const PLFunc&) = default;

 private:
  void normalize();

  std::vector<Breakpoint> breakpoints_;
  std::vector<Rat> slopes_;
};

Rat eval(const PLFunc& f, const Rat& x);

// outer o inner, exactly.
PLFunc compose(const PLFunc& outer, const PLFunc& inner);

// The inverse function (swap coordinates, reciprocal slopes).
PLFunc invert(const PLFunc& f);

template <typename F>
PLFunc PLFunc::from_samples(std::span<const Rat> xs, F&& f) {
  std::vector<Breakpoint> bps;
  std::vector<Rat> slopes;
  bps.reserve(xs.size());
  Rat prev_x;
  Rat prev_y;
  for (const Rat& x : xs) {
    Rat y = f(x);
    slopes.push_back((y - prev_y) / (x - prev_x));
    bps.push_back({x, y});
    prev_x = x;
    prev_y = std::move(y);
  }
  const Rat probe = prev_x + Rat(1);
  slopes.push_back(f(probe) - prev_y);
  return PLFunc(std::move(bps), std::move(slopes));
}

}  // namespace ramify
