#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ramify/error.hpp"

namespace ramify {

// Normal-form word a_1^{e_1} ... a_n^{e_n}, each e_k in [0, p).
// Generators are 0-based in code and 1-based in JSON and messages.
struct GroupElement {
  std::vector<int> exps;

  GroupElement() = default;
  explicit GroupElement(std::vector<int> e) : exps(std::move(e)) {}

  static GroupElement identity(int n) { return GroupElement(std::vector<int>(n, 0)); }
  static GroupElement generator(int n, int k, int power = 1);

  int size() const { return static_cast<int>(exps.size()); }
  bool is_identity() const;
  // Index of the first nonzero exponent, or size() for the identity.
  int leading_index() const;
  std::string str() const;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

// Power-commutator presentation of a group of order p^n:
//   a_j^p       = power_rhs(j)       (word in a_{j+1..n})
//   [a_j, a_i]  = comm_rhs(j, i)     (word in a_{j+1..n}),  i < j
// with [x, y] = x^-1 y^-1 x y. Unlisted relations are trivial.
//
// Construction only checks structure; consistency is a separate question
// answered by consistency_check(), and PcGroup refuses inconsistent input.
class PcPresentation {
 public:
  PcPresentation(int p, int n);

  int p() const { return p_; }
  int n() const { return n_; }

  void set_power(int j, GroupElement rhs);
  void set_comm(int j, int i, GroupElement rhs);

  const GroupElement& power_rhs(int j) const { return power_[j]; }
  const GroupElement& comm_rhs(int j, int i) const { return comm_[index(j, i)]; }

  friend bool operator==(const PcPresentation&, const PcPresentation&) = default;

 private:
  std::size_t index(int j, int i) const;
  void check_rhs(int after, const GroupElement& rhs, const std::string& where) const;

  int p_;
  int n_;
  std::vector<GroupElement> power_;
  std::vector<GroupElement> comm_;  // lower triangle, row j holds i < j
};

// Collection to normal form. Defined for any structurally valid
// presentation; it is a group law exactly when the presentation is
// consistent.
class Collector {
 public:
  explicit Collector(const PcPresentation& pres);

  GroupElement multiply(const GroupElement& x, const GroupElement& y) const;
  const PcPresentation& presentation() const { return pres_; }

 private:
  void times_power(std::vector<int>& r, int k, int e) const;
  void times_element(std::vector<int>& r, const std::vector<int>& y) const;
  const std::vector<int>& act(int k, int e, int j, int m) const {
    const auto p = static_cast<std::size_t>(pres_.p());
    const auto n = static_cast<std::size_t>(pres_.n());
    return act_[((static_cast<std::size_t>(k) * p + static_cast<std::size_t>(e)) * n +
                 static_cast<std::size_t>(j)) * p + static_cast<std::size_t>(m)];
  }

  PcPresentation pres_;
  // act(k, e, j, m) = (a_j^m)^(a_k^e) for j > k, 1 <= e < p, 0 <= m < p.
  std::vector<std::vector<int>> act_;
};

struct AssociativityWitness {
  GroupElement x, y, z;
  GroupElement left;   // (xy)z
  GroupElement right;  // x(yz)
};

struct ConsistencyReport {
  bool consistent = true;
  std::string method;  // "exhaustive" or "overlap"
  std::optional<AssociativityWitness> witness;
};

// Exhaustive (xy)g = x(yg) over all x, y and generators g when the group is
// small; otherwise the standard overlap test words plus seeded random
// triples.
ConsistencyReport consistency_check(const PcPresentation& pres);

class InconsistentPresentation : public Error {
 public:
  explicit InconsistentPresentation(AssociativityWitness w);
  const AssociativityWitness& witness() const { return witness_; }

 private:
  AssociativityWitness witness_;
};

// Element count limit for operations that enumerate the group. 2^20 by
// default; the RAMIFY_CAP environment variable overrides it.
std::uint64_t enumeration_cap();

// A presentation that passed consistency_check.
class PcGroup {
 public:
  // Throws InconsistentPresentation with the witness on failure.
  explicit PcGroup(PcPresentation pres);

  const PcPresentation& presentation() const { return collector_.presentation(); }
  int p() const { return presentation().p(); }
  int n() const { return presentation().n(); }

  // p^n; throws cap_exceeded when it does not fit 64 bits.
  std::uint64_t order() const;
  // Throws cap_exceeded when order() exceeds enumeration_cap().
  void require_enumerable() const;

  GroupElement identity() const { return GroupElement::identity(n()); }
  GroupElement generator(int k) const { return GroupElement::generator(n(), k); }

  GroupElement multiply(const GroupElement& x, const GroupElement& y) const {
    return collector_.multiply(x, y);
  }
  GroupElement inverse(const GroupElement& x) const;
  GroupElement commutator(const GroupElement& x, const GroupElement& y) const;
  GroupElement power(const GroupElement& x, long e) const;
  GroupElement power_p(const GroupElement& x) const { return power(x, p()); }
  // x^g = g^-1 x g.
  GroupElement conjugate(const GroupElement& x, const GroupElement& g) const;

  // Mixed-radix code, first generator most significant; codes order
  // elements lexicographically by exponent vector.
  std::uint64_t encode(const GroupElement& x) const;
  GroupElement decode(std::uint64_t code) const;

  // Validates length and exponent range; throws malformed_input.
  void check_element(const GroupElement& x, const std::string& where) const;

 private:
  Collector collector_;
};

GroupElement collect_product(const PcGroup& g, const GroupElement& x, const GroupElement& y);
GroupElement invert_element(const PcGroup& g, const GroupElement& x);
GroupElement commutator(const PcGroup& g, const GroupElement& x, const GroupElement& y);
GroupElement power_p(const PcGroup& g, const GroupElement& x);

// The order-p^3 group <a1, a2 | a1^p = a2^p = 1, [a2, a1] = a3 central,
// a3^p = 1>.
PcPresentation build_heisenberg(int p);

}  // namespace ramify
