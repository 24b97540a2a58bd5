#include "ramify/filtration.hpp"

#include <algorithm>
#include <limits>

namespace ramify {

namespace {

std::vector<long> ig_table(const PcGroup& g, const IgAssignment& ig) {
  g.require_enumerable();
  if (ig.default_value < 1) {
    throw malformed("bad-ig-value", "i_G values must be >= 1", "default");
  }
  std::vector<long> table(g.order(), ig.default_value);
  for (std::size_t k = 0; k < ig.entries.size(); ++k) {
    const auto& e = ig.entries[k];
    const std::string where = "ig[" + std::to_string(k) + "]";
    g.check_element(e.element, where);
    if (e.element.is_identity()) {
      throw malformed("identity-in-ig", "the identity has i_G = infinity", where);
    }
    if (e.value < 1) throw malformed("bad-ig-value", "i_G values must be >= 1", where);
    table[g.encode(e.element)] = e.value;
  }
  return table;
}

// Sorted distinct values of i_G over non-identity elements.
std::vector<long> distinct_values(const std::vector<long>& table) {
  std::vector<long> v(table.begin() + 1, table.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool in_level(const std::vector<long>& table, std::uint64_t code, long i) {
  return code == 0 || table[code] >= i + 1;
}

}  // namespace

FiltrationValidation validate(const PcGroup& g, const IgAssignment& ig) {
  const auto table = ig_table(g, ig);
  FiltrationValidation out;
  // Level sets only change at i = v - 1 for values v of i_G.
  for (long v : distinct_values(table)) {
    const long level = v - 1;
    std::vector<GroupElement> members;
    for (std::uint64_t c = 0; c < table.size(); ++c) {
      if (in_level(table, c, level)) members.push_back(g.decode(c));
    }
    for (const auto& x : members) {
      for (const auto& y : members) {
        if (!in_level(table, g.encode(g.multiply(x, y)), level)) {
          return {false, level, "product", x, y};
        }
      }
      for (int k = 0; k < g.n(); ++k) {
        if (!in_level(table, g.encode(g.conjugate(x, g.generator(k))), level)) {
          return {false, level, "conjugation", x, g.generator(k)};
        }
      }
    }
  }
  return out;
}

RamFiltration::RamFiltration(std::shared_ptr<const PcGroup> g, const IgAssignment& ig)
    : group_(std::move(g)) {
  ig_ = ig_table(*group_, ig);
  const FiltrationValidation v = validate(*group_, ig);
  if (!v.ok) {
    throw malformed("invalid-filtration",
                    "level G_" + std::to_string(v.level) + " is not a normal subgroup (" + v.kind +
                        " of " + v.x.str() + " and " + v.y.str() + ")",
                    "ig");
  }
  for (long v : distinct_values(ig_)) breaks_.push_back(v - 1);
}

std::optional<long> RamFiltration::ig(const GroupElement& x) const {
  group_->check_element(x, "element");
  const auto code = group_->encode(x);
  if (code == 0) return std::nullopt;
  return ig_[code];
}

Subgroup RamFiltration::lower_level(long i) const {
  std::vector<std::uint64_t> codes;
  for (std::uint64_t c = 0; c < ig_.size(); ++c) {
    if (in_level(ig_, c, i)) codes.push_back(c);
  }
  std::vector<GroupElement> gens;
  for (std::size_t k = 1; k < codes.size(); ++k) gens.push_back(group_->decode(codes[k]));
  return Subgroup(std::move(codes), std::move(gens));
}

Subgroup RamFiltration::lower_level(const Rat& x) const {
  const mpz_class c = x.ceil();
  if (!c.fits_slong_p()) return lower_level(c > 0 ? std::numeric_limits<long>::max() : 0L);
  return lower_level(c.get_si());
}

IgAssignment RamFiltration::assignment() const {
  IgAssignment out;
  for (std::uint64_t c = 1; c < ig_.size(); ++c) out.entries.push_back({group_->decode(c), ig_[c]});
  return out;
}

PLFunc herbrand_of(const RamFiltration& rf) {
  const Rat order(static_cast<long>(rf.group().order()));
  auto inverse_index = [&](long t) {
    return Rat(static_cast<long>(rf.lower_level(t).order())) / order;
  };
  std::vector<Breakpoint> bps;
  std::vector<Rat> slopes{inverse_index(1)};
  Rat x;
  Rat y;
  for (long b : rf.lower_breaks()) {
    if (b == 0) continue;  // a break at 0 only sets the initial slope
    y += slopes.back() * (Rat(b) - x);
    x = Rat(b);
    bps.push_back({x, y});
    slopes.push_back(inverse_index(b + 1));
  }
  return PLFunc(std::move(bps), std::move(slopes));
}

std::vector<Rat> upper_breaks(const RamFiltration& rf) {
  const PLFunc phi = herbrand_of(rf);
  std::vector<Rat> out;
  for (long b : rf.lower_breaks()) out.push_back(phi(Rat(b)));
  return out;
}

Subgroup upper_level(const RamFiltration& rf, const Rat& u) {
  const PLFunc psi = invert(herbrand_of(rf));
  return rf.lower_level(psi(u));
}

QuotientFiltration quotient_filtration(const RamFiltration& rf, const Subgroup& h) {
  auto source = rf.group_ptr();
  auto map = std::make_shared<const QuotientMap>(*source, h);
  auto quotient = std::make_shared<const PcGroup>(map->quotient());

  // Upper levels of G are constant on (w_{k-1}, w_k] with value G_{b_k};
  // their images I_k are the upper levels of G/H.
  const auto& breaks = rf.lower_breaks();
  const std::vector<Rat> w = upper_breaks(rf);
  std::vector<Subgroup> images;
  for (long b : breaks) images.push_back(map->image(rf.lower_level(b)));
  images.push_back(trivial_subgroup(*quotient));

  const Rat q_order(static_cast<long>(quotient->order()));
  std::vector<Rat> q_lower;  // rebuilt lower break at each quotient jump
  std::vector<std::size_t> q_jump;
  Rat psi;
  Rat prev_w;
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    psi += (w[k] - prev_w) * (q_order / Rat(static_cast<long>(images[k].order())));
    prev_w = w[k];
    if (images[k] == images[k + 1]) continue;
    if (!psi.is_integer()) {
      throw infeasible("non-integral-quotient-break",
                       "quotient lower break " + psi.str() + " is not an integer", "H");
    }
    q_lower.push_back(psi);
    q_jump.push_back(k);
  }

  IgAssignment ig;
  for (std::uint64_t c = 1; c < quotient->order(); ++c) {
    long value = 1;
    for (std::size_t j = 0; j < q_jump.size(); ++j) {
      if (images[q_jump[j]].contains_code(c)) value = q_lower[j].num().get_si() + 1;
    }
    ig.entries.push_back({quotient->decode(c), value});
  }
  return {std::move(source), std::move(map), RamFiltration(quotient, ig)};
}

}  // namespace ramify
