#pragma once

#include <random>

#include "ramify/rational.hpp"

namespace testing_support {

// random rational in [0, hi] with denominator dividing den
inline ramify::Rat random_rat(std::mt19937& rng, long hi, long den) {
  std::uniform_int_distribution<long> num(0, hi * den);
  return ramify::Rat(num(rng), den);
}

// step-by-step oracles, no PLFunc involved
inline ramify::Rat psi_direct(long i, long p, const ramify::Rat& x) {
  return x <= ramify::Rat(i) ? x : ramify::Rat(p) * x - ramify::Rat((p - 1) * i);
}

inline ramify::Rat phi_direct(long i, long p, const ramify::Rat& y) {
  return y <= ramify::Rat(i) ? y : ramify::Rat(i) + (y - ramify::Rat(i)) / ramify::Rat(p);
}

}  // namespace testing_support

#include <cstdlib>
#include <string>

#include "ramify/json_io.hpp"
#include "ramify/subgroups.hpp"

namespace testing_support {

inline std::string data(const std::string& name) { return std::string(RAMIFY_DATA_DIR) + "/" + name; }

inline ramify::PcPresentation load_presentation(const std::string& name) {
  return ramify::io::presentation_from_json(ramify::io::read_json_file(data(name)));
}

// naive closure: keep multiplying until nothing new appears
inline std::vector<std::uint64_t> brute_closure(const ramify::PcGroup& g,
                                                const std::vector<ramify::GroupElement>& gens) {
  std::vector<ramify::GroupElement> elems{g.identity()};
  std::vector<bool> seen(g.order(), false);
  seen[0] = true;
  for (std::size_t k = 0; k < elems.size(); ++k) {
    for (const auto& s : gens) {
      auto y = g.multiply(elems[k], s);
      const auto c = g.encode(y);
      if (!seen[c]) {
        seen[c] = true;
        elems.push_back(std::move(y));
      }
    }
  }
  std::vector<std::uint64_t> codes;
  for (std::uint64_t c = 0; c < seen.size(); ++c) {
    if (seen[c]) codes.push_back(c);
  }
  return codes;
}

inline std::vector<ramify::GroupElement> all_elements(const ramify::PcGroup& g) {
  std::vector<ramify::GroupElement> out;
  for (std::uint64_t c = 0; c < g.order(); ++c) out.push_back(g.decode(c));
  return out;
}

struct ScopedEnv {
  std::string name;
  ScopedEnv(std::string n, const std::string& value) : name(std::move(n)) { setenv(name.c_str(), value.c_str(), 1); }
  ~ScopedEnv() { unsetenv(name.c_str()); }
};

}  // namespace testing_support
