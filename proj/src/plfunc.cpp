#include "ramify/plfunc.hpp"

#include <algorithm>

#include "ramify/error.hpp"

namespace ramify {

PLFunc::PLFunc() : slopes_{Rat(1)} {}

PLFunc::PLFunc(std::vector<Breakpoint> breakpoints, std::vector<Rat> slopes)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)) {
  if (slopes_.size() != breakpoints_.size() + 1) {
    throw malformed("bad-plfunc", "slopes must number breakpoints + 1");
  }
  for (const Rat& s : slopes_) {
    if (s.sign() <= 0) throw malformed("bad-plfunc", "slopes must be positive");
  }
  Rat x0;
  Rat y0;
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    const auto& bp = breakpoints_[k];
    if (bp.x <= x0) {
      throw malformed("bad-plfunc", "breakpoint abscissae must increase from 0");
    }
    if (y0 + slopes_[k] * (bp.x - x0) != bp.y) {
      throw malformed("bad-plfunc", "function is discontinuous at x=" + bp.x.str());
    }
    x0 = bp.x;
    y0 = bp.y;
  }
  normalize();
}

void PLFunc::normalize() {
  std::vector<Breakpoint> bps;
  std::vector<Rat> slopes{slopes_.front()};
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (slopes_[k + 1] == slopes.back()) continue;
    bps.push_back(breakpoints_[k]);
    slopes.push_back(slopes_[k + 1]);
  }
  breakpoints_ = std::move(bps);
  slopes_ = std::move(slopes);
}

const Rat& PLFunc::slope_right_of(const Rat& x) const {
  const auto it = std::upper_bound(
      breakpoints_.begin(), breakpoints_.end(), x,
      [](const Rat& v, const Breakpoint& bp) { return v < bp.x; });
  return slopes_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

Rat PLFunc::operator()(const Rat& x) const {
  if (x.sign() < 0) throw malformed("negative-argument", "evaluation at x < 0");
  const auto it = std::upper_bound(
      breakpoints_.begin(), breakpoints_.end(), x,
      [](const Rat& v, const Breakpoint& bp) { return v < bp.x; });
  const auto seg = static_cast<std::size_t>(it - breakpoints_.begin());
  if (seg == 0) return slopes_[0] * x;
  const Breakpoint& left = breakpoints_[seg - 1];
  return left.y + slopes_[seg] * (x - left.x);
}

Rat eval(const PLFunc& f, const Rat& x) { return f(x); }

PLFunc compose(const PLFunc& outer, const PLFunc& inner) {
  const PLFunc inner_inv = invert(inner);
  std::vector<Rat> xs;
  for (const auto& bp : inner.breakpoints()) xs.push_back(bp.x);
  for (const auto& bp : outer.breakpoints()) xs.push_back(inner_inv(bp.x));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return PLFunc::from_samples(std::span<const Rat>(xs),
                              [&](const Rat& x) { return outer(inner(x)); });
}

PLFunc invert(const PLFunc& f) {
  std::vector<Breakpoint> bps;
  bps.reserve(f.breakpoints().size());
  for (const auto& bp : f.breakpoints()) bps.push_back({bp.y, bp.x});
  std::vector<Rat> slopes;
  slopes.reserve(f.slopes().size());
  for (const auto& s : f.slopes()) slopes.push_back(Rat(1) / s);
  return PLFunc(std::move(bps), std::move(slopes));
}

}  // namespace ramify
