#include "ramify/subgroups.hpp"

#include <algorithm>
#include <deque>

namespace ramify {

bool Subgroup::contains_code(std::uint64_t code) const {
  return std::binary_search(codes_.begin(), codes_.end(), code);
}

bool Subgroup::contains(const PcGroup& g, const GroupElement& x) const {
  return contains_code(g.encode(x));
}

std::vector<GroupElement> Subgroup::elements(const PcGroup& g) const {
  std::vector<GroupElement> out;
  out.reserve(codes_.size());
  for (auto c : codes_) out.push_back(g.decode(c));
  return out;
}

bool Subgroup::is_subset_of(const Subgroup& other) const {
  return std::includes(other.codes_.begin(), other.codes_.end(), codes_.begin(), codes_.end());
}

namespace {

// Incremental closure under right multiplication by a growing generator list.
class ClosureBuilder {
 public:
  explicit ClosureBuilder(const PcGroup& g) : g_(g), member_(g.order(), false) {
    add_member(g.identity());
  }

  bool contains(const GroupElement& x) const { return member_[g_.encode(x)]; }

  void add_generator(const GroupElement& x) {
    if (contains(x)) {
      gens_.push_back(x);  // keep it: normal generators must stay listed
      return;
    }
    gens_.push_back(x);
    std::deque<GroupElement> queue(elements_.begin(), elements_.end());
    while (!queue.empty()) {
      const GroupElement e = std::move(queue.front());
      queue.pop_front();
      for (const auto& s : gens_) {
        GroupElement m = g_.multiply(e, s);
        if (!member_[g_.encode(m)]) {
          add_member(m);
          queue.push_back(std::move(m));
        }
      }
    }
  }

  const std::vector<GroupElement>& generators() const { return gens_; }

  Subgroup build() const {
    std::vector<std::uint64_t> codes;
    codes.reserve(elements_.size());
    for (const auto& e : elements_) codes.push_back(g_.encode(e));
    std::sort(codes.begin(), codes.end());
    std::vector<GroupElement> gens;
    for (const auto& s : gens_) {
      if (!s.is_identity() && std::find(gens.begin(), gens.end(), s) == gens.end()) {
        gens.push_back(s);
      }
    }
    return Subgroup(std::move(codes), std::move(gens));
  }

 private:
  void add_member(const GroupElement& x) {
    member_[g_.encode(x)] = true;
    elements_.push_back(x);
  }

  const PcGroup& g_;
  std::vector<bool> member_;
  std::vector<GroupElement> elements_;
  std::vector<GroupElement> gens_;
};

Subgroup close(const PcGroup& g, std::span<const GroupElement> gens,
               const std::vector<GroupElement>* conjugators) {
  g.require_enumerable();
  ClosureBuilder builder(g);
  for (const auto& x : gens) {
    g.check_element(x, "generator " + x.str());
    builder.add_generator(x);
  }
  if (conjugators) {
    // Generators list grows while we scan it; every entry gets conjugated.
    for (std::size_t idx = 0; idx < builder.generators().size(); ++idx) {
      for (const auto& c : *conjugators) {
        GroupElement y = g.conjugate(builder.generators()[idx], c);
        if (!builder.contains(y)) builder.add_generator(y);
      }
    }
  }
  return builder.build();
}

std::vector<GroupElement> pc_generators(const PcGroup& g) {
  std::vector<GroupElement> out;
  for (int k = 0; k < g.n(); ++k) out.push_back(g.generator(k));
  return out;
}

// [N, G] for N normal with normal generators X: normal closure of [x, a_k].
std::vector<GroupElement> commutators_with_generators(const PcGroup& g, const Subgroup& n) {
  std::vector<GroupElement> out;
  for (const auto& x : n.generators()) {
    for (int k = 0; k < g.n(); ++k) out.push_back(g.commutator(x, g.generator(k)));
  }
  return out;
}

template <typename Next>
std::vector<Subgroup> descend(const PcGroup& g, Next next) {
  std::vector<Subgroup> series{whole_group(g)};
  while (!series.back().is_trivial()) {
    Subgroup s = next(series.back());
    if (s == series.back()) break;  // not reachable for p-groups
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace

Subgroup subgroup_closure(const PcGroup& g, std::span<const GroupElement> gens, bool normal) {
  if (!normal) return close(g, gens, nullptr);
  const auto conj = pc_generators(g);
  return close(g, gens, &conj);
}

Subgroup normal_closure_in(const PcGroup& g, std::span<const GroupElement> gens,
                           const Subgroup& within) {
  return close(g, gens, &within.generators());
}

Subgroup whole_group(const PcGroup& g) {
  const auto gens = pc_generators(g);
  return subgroup_closure(g, gens, false);
}

Subgroup trivial_subgroup(const PcGroup& g) { return subgroup_closure(g, {}, false); }

std::vector<Subgroup> lower_central_series(const PcGroup& g) {
  return descend(g, [&](const Subgroup& prev) {
    const auto comms = commutators_with_generators(g, prev);
    return subgroup_closure(g, comms, true);
  });
}

std::vector<Subgroup> lower_p_series(const PcGroup& g) {
  return descend(g, [&](const Subgroup& prev) {
    auto gens = commutators_with_generators(g, prev);
    for (const auto& x : prev.generators()) gens.push_back(g.power_p(x));
    return subgroup_closure(g, gens, true);
  });
}

Subgroup power_subgroup(const PcGroup& g) {
  g.require_enumerable();
  std::vector<GroupElement> powers;
  const std::uint64_t order = g.order();
  for (std::uint64_t c = 0; c < order; ++c) {
    GroupElement y = g.power_p(g.decode(c));
    if (!y.is_identity()) powers.push_back(std::move(y));
  }
  std::sort(powers.begin(), powers.end());
  powers.erase(std::unique(powers.begin(), powers.end()), powers.end());
  return subgroup_closure(g, powers, false);
}

SeriesReport series_equality_check(const PcGroup& g) {
  const auto gamma = lower_central_series(g);
  const auto pser = lower_p_series(g);
  const Subgroup trivial = trivial_subgroup(g);
  SeriesReport r;
  for (const auto& s : gamma) r.gamma_orders.push_back(s.order());
  for (const auto& s : pser) r.p_series_orders.push_back(s.order());
  const std::size_t levels = std::max(gamma.size(), pser.size());
  for (std::size_t i = 0; i < levels; ++i) {
    const Subgroup& a = i < gamma.size() ? gamma[i] : trivial;
    const Subgroup& b = i < pser.size() ? pser[i] : trivial;
    r.level_equal.push_back(a == b);
    r.all_equal = r.all_equal && a == b;
  }
  const Subgroup derived = gamma.size() > 1 ? gamma[1] : trivial;
  r.power_in_derived = power_subgroup(g).is_subset_of(derived);
  return r;
}

int min_generators(const PcGroup& g, const Subgroup& h) {
  std::vector<GroupElement> frattini_gens;
  const auto& xs = h.generators();
  for (std::size_t a = 0; a < xs.size(); ++a) {
    frattini_gens.push_back(g.power_p(xs[a]));
    for (std::size_t b = 0; b < a; ++b) frattini_gens.push_back(g.commutator(xs[a], xs[b]));
  }
  const Subgroup phi = normal_closure_in(g, frattini_gens, h);
  std::uint64_t index = h.order() / phi.order();
  int d = 0;
  while (index > 1) {
    index /= static_cast<std::uint64_t>(g.p());
    ++d;
  }
  return d;
}

ElementLength element_length(const PcGroup& g, const GroupElement& x) {
  g.check_element(x, "element");
  const auto gamma = lower_central_series(g);
  const int nilpotency_class = static_cast<int>(gamma.size()) - 1;
  if (x.is_identity()) return {nilpotency_class + 1, true};
  int length = 0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i].contains(g, x)) length = static_cast<int>(i) + 1;
  }
  return {length, false};
}

ProbeReport just_infinite_probe(const PcGroup& g, std::span<const int> tower_indices) {
  for (int t : tower_indices) {
    if (t < 1 || t > g.n()) {
      throw malformed("bad-tower-index", "tower index " + std::to_string(t) + " out of range",
                      "tower");
    }
  }
  for (std::size_t k = 2; k < tower_indices.size(); ++k) {
    const GroupElement c = g.commutator(g.generator(tower_indices[k - 1] - 1),
                                        g.generator(tower_indices[k - 2] - 1));
    if (c != g.generator(tower_indices[k] - 1)) {
      throw malformed("not-a-c-tower",
                      "a_" + std::to_string(tower_indices[k]) + " is not [a_" +
                          std::to_string(tower_indices[k - 1]) + ", a_" +
                          std::to_string(tower_indices[k - 2]) + "]",
                      "tower");
    }
  }
  ProbeReport report;
  for (std::size_t k = 0; k < tower_indices.size(); ++k) {
    const GroupElement a = g.generator(tower_indices[k] - 1);
    const Subgroup closure = subgroup_closure(g, std::span(&a, 1), true);
    ProbeRow row{tower_indices[k], closure.order(), {}};
    for (std::size_t later = k + 1; later < tower_indices.size(); ++later) {
      const bool in = closure.contains(g, g.generator(tower_indices[later] - 1));
      if (k == 0 && later == 1) {
        row.exempt = tower_indices[later];
        row.exempt_contained = in;
      } else if (!in) {
        row.missing.push_back(tower_indices[later]);
      }
    }
    report.pass = report.pass && row.missing.empty();
    report.rows.push_back(std::move(row));
  }
  return report;
}

int rank_growth_probe(const PcGroup& g, int k) {
  if (k < 0) throw malformed("bad-k", "k must be >= 0", "k");
  if (g.n() < 2 * k + 2) {
    throw malformed("depth-too-small",
                    "rank probe with k=" + std::to_string(k) + " needs at least " +
                        std::to_string(2 * k + 2) + " generators, have " +
                        std::to_string(g.n()),
                    "k");
  }
  std::vector<GroupElement> gens;
  // k = 0 degenerates to the whole group
  for (int i = 1; i <= g.n(); ++i) {
    if ((i >= 2 && i <= 2 * k - 1) || i >= 2 * k + 1) gens.push_back(g.generator(i - 1));
  }
  return min_generators(g, subgroup_closure(g, gens, false));
}

PcPresentation c_tower_presentation(int p, int depth, FillPolicy policy,
                                    const RelationTable& table) {
  if (depth < 3) throw malformed("depth-too-small", "C-tower truncation needs depth >= 3", "depth");
  PcPresentation pres(p, depth);
  std::vector<std::pair<int, int>> fixed;
  for (int k = 1; k + 1 < depth; ++k) {
    pres.set_comm(k, k - 1, GroupElement::generator(depth, k + 1));
    fixed.emplace_back(k, k - 1);
  }
  if (policy == FillPolicy::table) {
    for (const auto& pw : table.powers) pres.set_power(pw.j, pw.rhs);
    for (const auto& c : table.comms) {
      if (std::find(fixed.begin(), fixed.end(), std::pair{c.j, c.i}) != fixed.end() &&
          c.rhs != GroupElement::generator(depth, c.j + 1)) {
        throw malformed("table-overrides-tower",
                        "table changes the tower relation [a_" + std::to_string(c.j + 1) +
                            ", a_" + std::to_string(c.i + 1) + "]",
                        "table");
      }
      pres.set_comm(c.j, c.i, c.rhs);
    }
  }
  return pres;
}

PcGroup build_c_tower_truncation(int p, int depth, FillPolicy policy, const RelationTable& table) {
  return PcGroup(c_tower_presentation(p, depth, policy, table));
}

}  // namespace ramify

namespace ramify {

bool is_normal(const PcGroup& g, const Subgroup& h) {
  for (const auto& x : h.generators()) {
    for (int k = 0; k < g.n(); ++k) {
      if (!h.contains(g, g.conjugate(x, g.generator(k)))) return false;
    }
  }
  return true;
}

namespace {

GroupElement sift_with(const PcGroup& g, const std::vector<int>& position,
                       const std::vector<GroupElement>& absorbers, int quotient_n,
                       const GroupElement& x) {
  GroupElement cur = x;
  GroupElement out = GroupElement::identity(quotient_n);
  for (int k = 0; k < g.n(); ++k) {
    const int c = cur.exps[k];
    if (c == 0) continue;
    if (position[k] >= 0) {
      // cur = a_k^c * tail in normal form; record a_k^c and keep the tail.
      out.exps[position[k]] = c;
      cur.exps[k] = 0;
    } else {
      cur = g.multiply(cur, g.power(absorbers[k], g.p() - c));
    }
  }
  return out;
}

}  // namespace

PcPresentation QuotientMap::quotient_presentation(const PcGroup& g, const Subgroup& h,
                                                  std::vector<int>& kept,
                                                  std::vector<GroupElement>& absorbers) {
  absorbers.assign(static_cast<std::size_t>(g.n()), GroupElement{});
  for (const auto& x : h.elements(g)) {
    const int lead = x.leading_index();
    if (lead == g.n() || !absorbers[lead].exps.empty()) continue;
    // Scale so the leading exponent is 1; leading exponents multiply under powers.
    int inv = 1;
    while ((inv * x.exps[lead]) % g.p() != 1) ++inv;
    absorbers[lead] = g.power(x, inv);
  }
  std::vector<int> position(static_cast<std::size_t>(g.n()), -1);
  kept.clear();
  for (int k = 0; k < g.n(); ++k) {
    if (absorbers[k].exps.empty()) {
      position[k] = static_cast<int>(kept.size());
      kept.push_back(k);
    }
  }
  const int m = static_cast<int>(kept.size());
  PcPresentation pres(g.p(), m);
  for (int r = 0; r < m; ++r) {
    const GroupElement a = g.generator(kept[r]);
    pres.set_power(r, sift_with(g, position, absorbers, m, g.power_p(a)));
    for (int s = 0; s < r; ++s) {
      pres.set_comm(r, s, sift_with(g, position, absorbers, m,
                                    g.commutator(a, g.generator(kept[s]))));
    }
  }
  return pres;
}

QuotientMap::QuotientMap(const PcGroup& g, const Subgroup& h)
    : source_(&g),
      quotient_([&] {
        if (!is_normal(g, h)) {
          throw malformed("not-normal", "quotient requires a normal subgroup", "H");
        }
        return quotient_presentation(g, h, kept_, absorbers_);
      }()) {
  position_.assign(static_cast<std::size_t>(g.n()), -1);
  for (std::size_t r = 0; r < kept_.size(); ++r) position_[kept_[r]] = static_cast<int>(r);
}

GroupElement QuotientMap::sift(const GroupElement& x) const {
  return sift_with(*source_, position_, absorbers_, quotient_.n(), x);
}

GroupElement QuotientMap::image(const GroupElement& x) const { return sift(x); }

Subgroup QuotientMap::image(const Subgroup& s) const {
  std::vector<GroupElement> gens;
  for (const auto& x : s.generators()) gens.push_back(sift(x));
  return subgroup_closure(quotient_, gens, false);
}

}  // namespace ramify
