#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ramify/plfunc.hpp"
#include "ramify/subgroups.hpp"

namespace ramify {

// Raw i_G data: explicit values for some elements, `default_value` for
// every other non-identity element. The identity is always at infinity.
struct IgAssignment {
  struct Entry {
    GroupElement element;
    long value;
  };
  std::vector<Entry> entries;
  long default_value = 1;
};

struct FiltrationValidation {
  bool ok = true;
  long level = 0;            // offending lower level i (G_i = {i_G >= i+1})
  std::string kind;          // "product" or "conjugation"
  GroupElement x, y;         // witness: x*y (or x^y) leaves G_i
};

// Checks that every level set G_i = {x : i_G(x) >= i+1} is a normal subgroup.
FiltrationValidation validate(const PcGroup& g, const IgAssignment& ig);

// A finite PC group with a validated lower-numbering break assignment.
class RamFiltration {
 public:
  // Throws malformed_input ("invalid-filtration") when validate() fails or
  // a value is < 1.
  RamFiltration(std::shared_ptr<const PcGroup> g, const IgAssignment& ig);

  const PcGroup& group() const { return *group_; }
  std::shared_ptr<const PcGroup> group_ptr() const { return group_; }

  // i_G(x); nullopt for the identity (infinity).
  std::optional<long> ig(const GroupElement& x) const;

  // G_i for integer i; G_i = G for i <= 0.
  Subgroup lower_level(long i) const;
  // G_x for rational x >= 0, i.e. G_{ceil(x)}.
  Subgroup lower_level(const Rat& x) const;

  // Integers t >= 0 with G_t != G_{t+1}, increasing.
  const std::vector<long>& lower_breaks() const { return breaks_; }

  // The i_G table in element-code order, identity excluded.
  IgAssignment assignment() const;

 private:
  std::shared_ptr<const PcGroup> group_;
  std::vector<long> ig_;  // by element code; identity slot unused
  std::vector<long> breaks_;
};

// phi_G(x) = integral_0^x dt / (G_0 : G_t), with G_t = G_{ceil(t)}.
PLFunc herbrand_of(const RamFiltration& rf);

// Upper breaks phi_G(t) of the lower breaks t.
std::vector<Rat> upper_breaks(const RamFiltration& rf);

// G^u = G_{psi_G(u)}.
Subgroup upper_level(const RamFiltration& rf, const Rat& u);

struct QuotientFiltration {
  std::shared_ptr<const PcGroup> source;  // keeps the map's domain alive
  std::shared_ptr<const QuotientMap> map;
  RamFiltration filtration;
};

// Filtration on G/H whose upper levels are the images of G^u. Its lower
// numbering is rebuilt from its own Herbrand function; throws
// infeasible ("non-integral-quotient-break") when a rebuilt lower break is
// not an integer.
QuotientFiltration quotient_filtration(const RamFiltration& rf, const Subgroup& h);

}  // namespace ramify
