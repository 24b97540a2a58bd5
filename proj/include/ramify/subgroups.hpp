#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ramify/pc_group.hpp"

namespace ramify {

// Explicitly enumerated subgroup of a finite PcGroup.
class Subgroup {
 public:
  Subgroup() = default;
  Subgroup(std::vector<std::uint64_t> sorted_codes, std::vector<GroupElement> generators)
      : codes_(std::move(sorted_codes)), generators_(std::move(generators)) {}

  std::uint64_t order() const { return codes_.size(); }
  bool is_trivial() const { return codes_.size() == 1; }
  bool contains(const PcGroup& g, const GroupElement& x) const;
  bool contains_code(std::uint64_t code) const;

  // Element codes in increasing order (see PcGroup::encode).
  const std::vector<std::uint64_t>& codes() const { return codes_; }
  // A generating set; for subgroups built as normal closures it also
  // generates the subgroup without further conjugation.
  const std::vector<GroupElement>& generators() const { return generators_; }
  std::vector<GroupElement> elements(const PcGroup& g) const;

  bool is_subset_of(const Subgroup& other) const;

  // Set equality; generators are ignored.
  friend bool operator==(const Subgroup& a, const Subgroup& b) { return a.codes_ == b.codes_; }

 private:
  std::vector<std::uint64_t> codes_;
  std::vector<GroupElement> generators_;
};

// Smallest subgroup (normal = false) or normal subgroup (normal = true)
// of g containing `gens`. Throws cap_exceeded above the enumeration cap.
Subgroup subgroup_closure(const PcGroup& g, std::span<const GroupElement> gens, bool normal);

// Normal closure of `gens` inside `within` (conjugation by within's generators).
Subgroup normal_closure_in(const PcGroup& g, std::span<const GroupElement> gens,
                           const Subgroup& within);

Subgroup whole_group(const PcGroup& g);
Subgroup trivial_subgroup(const PcGroup& g);

// gamma_1 = G, gamma_{i+1} = [gamma_i, G], down to the trivial subgroup
// (included as the last entry).
std::vector<Subgroup> lower_central_series(const PcGroup& g);

// P_0 = G, P_{i+1} = P_i^p [P_i, G], down to the trivial subgroup.
std::vector<Subgroup> lower_p_series(const PcGroup& g);

// Subgroup generated by all p-th powers of elements of g.
Subgroup power_subgroup(const PcGroup& g);

struct SeriesReport {
  std::vector<std::uint64_t> gamma_orders;
  std::vector<std::uint64_t> p_series_orders;
  // level_equal[i]: gamma_{i+1} == P_i as sets; levels missing from the
  // shorter series compare against the trivial subgroup.
  std::vector<bool> level_equal;
  bool all_equal = true;
  bool power_in_derived = true;  // G^p is contained in [G, G]
};

SeriesReport series_equality_check(const PcGroup& g);

// Minimal number of generators of h: dim over F_p of h / h^p[h, h].
int min_generators(const PcGroup& g, const Subgroup& h);

struct ElementLength {
  int length = 0;              // greatest i with x in gamma_i
  bool exceeds_class = false;  // identity: length is reported as class + 1
};

ElementLength element_length(const PcGroup& g, const GroupElement& x);

struct ProbeRow {
  int tower_position = 0;  // 1-based generator index of the tower element
  std::uint64_t closure_order = 0;
  std::vector<int> missing;  // later tower generators absent from the closure
  // The first tower element has no predecessor, so its successor is a free
  // generator and is not expected in its closure. Recorded, never counted.
  std::optional<int> exempt;
  bool exempt_contained = false;
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  bool pass = true;
};

// For each tower generator a_i (1-based indices, consecutive entries must
// satisfy a_{t[k+1]} = [a_{t[k]}, a_{t[k-1]}]), checks that the normal
// closure of a_i contains every later tower generator (see ProbeRow::exempt).
ProbeReport just_infinite_probe(const PcGroup& g, std::span<const int> tower_indices);

// min_generators of <a_2, ..., a_{2k-1}, a_{2k+1}, a_{2k+2}, ..., a_n>.
// Needs n >= 2k + 2; k = 0 takes the whole group.
int rank_growth_probe(const PcGroup& g, int k);

// True when every conjugate of a generator of h by a PC generator stays in h.
bool is_normal(const PcGroup& g, const Subgroup& h);

// Natural map G -> G/H for a normal subgroup H, with a PC presentation of
// the quotient on the images of the PC generators not absorbed by H.
class QuotientMap {
 public:
  // Throws malformed_input ("not-normal") when h is not normal.
  QuotientMap(const PcGroup& g, const Subgroup& h);

  const PcGroup& quotient() const { return quotient_; }
  // 0-based generators of G that survive as quotient generators.
  const std::vector<int>& kept() const { return kept_; }

  GroupElement image(const GroupElement& x) const;
  Subgroup image(const Subgroup& s) const;

 private:
  static PcPresentation quotient_presentation(const PcGroup& g, const Subgroup& h,
                                              std::vector<int>& kept,
                                              std::vector<GroupElement>& absorbers);
  GroupElement sift(const GroupElement& x) const;

  const PcGroup* source_;
  std::vector<int> kept_;
  std::vector<int> position_;             // source index -> quotient index or -1
  std::vector<GroupElement> absorbers_;   // element of H with leading a_k^1, or empty
  PcGroup quotient_;
};

// ---------------------------------------------------------------------------

enum class FillPolicy { trivial_fill, table };

struct RelationTable {
  struct Power { int j; GroupElement rhs; };
  struct Comm { int j; int i; GroupElement rhs; };  // [a_j, a_i], i < j
  std::vector<Power> powers;
  std::vector<Comm> comms;
};

// Generators a_1..a_d with [a_k, a_{k-1}] = a_{k+1} for k+1 <= d; every
// other relation trivial (trivial_fill) or taken from `table`. Returns the
// checked group; throws InconsistentPresentation when the fill does not
// define a group of order p^d.
PcGroup build_c_tower_truncation(int p, int depth, FillPolicy policy,
                                 const RelationTable& table = {});

PcPresentation c_tower_presentation(int p, int depth, FillPolicy policy,
                                    const RelationTable& table = {});

}  // namespace ramify
