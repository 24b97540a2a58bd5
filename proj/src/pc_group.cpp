#include "ramify/pc_group.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <random>
#include <sstream>

#include "ramify/rational.hpp"

namespace ramify {

GroupElement GroupElement::generator(int n, int k, int power) {
  GroupElement g = identity(n);
  g.exps.at(static_cast<std::size_t>(k)) = power;
  return g;
}

bool GroupElement::is_identity() const { return leading_index() == size(); }

int GroupElement::leading_index() const {
  for (int k = 0; k < size(); ++k) {
    if (exps[k] != 0) return k;
  }
  return size();
}

std::string GroupElement::str() const {
  std::ostringstream os;
  os << '[';
  for (int k = 0; k < size(); ++k) os << (k ? "," : "") << exps[k];
  os << ']';
  return os.str();
}

// ---------------------------------------------------------------------------

PcPresentation::PcPresentation(int p, int n) : p_(p), n_(n) {
  if (!is_prime(p)) throw malformed("non-prime-p", "p=" + std::to_string(p) + " is not prime", "p");
  if (n < 0 || n > 64) throw malformed("bad-n", "generator count must be in [0, 64]", "n");
  power_.assign(static_cast<std::size_t>(n), GroupElement::identity(n));
  comm_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n > 0 ? n - 1 : 0) / 2,
               GroupElement::identity(n));
}

std::size_t PcPresentation::index(int j, int i) const {
  if (!(0 <= i && i < j && j < n_)) {
    throw malformed("bad-relation-index",
                    "commutator indices need 1 <= i < j <= n, got j=" + std::to_string(j + 1) +
                        " i=" + std::to_string(i + 1));
  }
  return static_cast<std::size_t>(j) * static_cast<std::size_t>(j - 1) / 2 +
         static_cast<std::size_t>(i);
}

void PcPresentation::check_rhs(int after, const GroupElement& rhs, const std::string& where) const {
  if (rhs.size() != n_) throw malformed("bad-rhs-length", "right-hand side has wrong length", where);
  for (int k = 0; k < n_; ++k) {
    const int e = rhs.exps[k];
    if (e < 0 || e >= p_) {
      throw malformed("exponent-out-of-range", "exponents must lie in [0, p)", where);
    }
    if (e != 0 && k <= after) {
      throw malformed("rhs-not-later", "right-hand side may only use later generators", where);
    }
  }
}

void PcPresentation::set_power(int j, GroupElement rhs) {
  const std::string where = "power j=" + std::to_string(j + 1);
  if (j < 0 || j >= n_) throw malformed("bad-relation-index", "power index out of range", where);
  check_rhs(j, rhs, where);
  power_[static_cast<std::size_t>(j)] = std::move(rhs);
}

void PcPresentation::set_comm(int j, int i, GroupElement rhs) {
  const std::string where = "comm j=" + std::to_string(j + 1) + " i=" + std::to_string(i + 1);
  const auto idx = index(j, i);
  check_rhs(j, rhs, where);
  comm_[idx] = std::move(rhs);
}

// ---------------------------------------------------------------------------

Collector::Collector(const PcPresentation& pres) : pres_(pres) {
  const int n = pres.n();
  const int p = pres.p();
  const auto slots = static_cast<std::size_t>(n) * static_cast<std::size_t>(p) *
                     static_cast<std::size_t>(n) * static_cast<std::size_t>(p);
  if (slots * static_cast<std::size_t>(std::max(n, 1)) > (std::size_t{1} << 26)) {
    throw Error(ErrorCode::cap_exceeded, "collector-tables-too-large",
                "conjugation tables for p=" + std::to_string(p) + ", n=" + std::to_string(n) +
                    " exceed the memory budget",
                "presentation");
  }
  act_.assign(slots, std::vector<int>(static_cast<std::size_t>(n), 0));
  auto slot = [&](int k, int e, int j, int m) -> std::vector<int>& {
    return const_cast<std::vector<int>&>(act(k, e, j, m));
  };
  // Rows for k only multiply inside <a_{k+1}, ..., a_n>, whose rows exist
  // already when k runs downwards.
  for (int k = n - 1; k >= 0; --k) {
    for (int e = 1; e < p; ++e) {
      for (int j = k + 1; j < n; ++j) {
        std::vector<int>& base = slot(k, e, j, 1);
        if (e == 1) {
          base = pres.comm_rhs(j, k).exps;  // a_j^{a_k} = a_j [a_j, a_k]
          base[static_cast<std::size_t>(j)] = 1;
        } else {
          // conjugate the e-1 image once more by a_k, letter by letter
          const std::vector<int> prev = slot(k, e - 1, j, 1);
          std::vector<int> img(static_cast<std::size_t>(n), 0);
          for (int i = k + 1; i < n; ++i) {
            if (prev[static_cast<std::size_t>(i)]) times_element(img, act(k, 1, i, prev[static_cast<std::size_t>(i)]));
          }
          base = std::move(img);
        }
      }
      for (int j = k + 1; j < n; ++j) {
        for (int m = 2; m < p; ++m) {
          std::vector<int> r = slot(k, e, j, m - 1);
          times_element(r, slot(k, e, j, 1));
          slot(k, e, j, m) = std::move(r);
        }
      }
    }
  }
}

// r <- r * a_k^e. Writing r = u * a_k^c * t with u over a_{<k} and t over
// a_{>k}: r a_k^e = u a_k^{c+e} t^{a_k^e}, and a_k^p folds into power_rhs(k).
// Every product formed below lives in <a_{k+1}, ..., a_n>, so the recursion
// terminates.
void Collector::times_power(std::vector<int>& r, int k, int e) const {
  const int n = pres_.n();
  const int p = pres_.p();
  std::vector<int> rest(static_cast<std::size_t>(n), 0);
  int c = r[static_cast<std::size_t>(k)] + e;
  if (c >= p) {
    c -= p;
    rest = pres_.power_rhs(k).exps;
  }
  for (int j = k + 1; j < n; ++j) {
    const int m = r[static_cast<std::size_t>(j)];
    if (m) times_element(rest, act(k, e, j, m));
  }
  r[static_cast<std::size_t>(k)] = c;
  for (int j = k + 1; j < n; ++j) r[static_cast<std::size_t>(j)] = rest[static_cast<std::size_t>(j)];
}

void Collector::times_element(std::vector<int>& r, const std::vector<int>& y) const {
  for (int k = 0; k < pres_.n(); ++k) {
    if (y[static_cast<std::size_t>(k)]) times_power(r, k, y[static_cast<std::size_t>(k)]);
  }
}

GroupElement Collector::multiply(const GroupElement& x, const GroupElement& y) const {
  std::vector<int> r = x.exps;
  times_element(r, y.exps);
  return GroupElement(std::move(r));
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kExhaustiveBudget = std::uint64_t{1} << 22;  // |G|^2 * n
constexpr int kRandomTriples = 2000;

std::optional<std::uint64_t> checked_order(int p, int n) {
  std::uint64_t order = 1;
  for (int k = 0; k < n; ++k) {
    if (order > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(p)) {
      return std::nullopt;
    }
    order *= static_cast<std::uint64_t>(p);
  }
  return order;
}

GroupElement decode_with(int p, int n, std::uint64_t code) {
  GroupElement x = GroupElement::identity(n);
  for (int k = n - 1; k >= 0; --k) {
    x.exps[k] = static_cast<int>(code % static_cast<std::uint64_t>(p));
    code /= static_cast<std::uint64_t>(p);
  }
  return x;
}

std::optional<AssociativityWitness> test_triple(const Collector& c, const GroupElement& x,
                                                const GroupElement& y, const GroupElement& z) {
  GroupElement left = c.multiply(c.multiply(x, y), z);
  GroupElement right = c.multiply(x, c.multiply(y, z));
  if (left == right) return std::nullopt;
  return AssociativityWitness{x, y, z, std::move(left), std::move(right)};
}

std::optional<AssociativityWitness> overlap_tests(const Collector& c) {
  const int n = c.presentation().n();
  const int p = c.presentation().p();
  auto gen = [n](int k, int e = 1) { return GroupElement::generator(n, k, e); };
  for (int i = 0; i < n; ++i) {
    if (auto w = test_triple(c, gen(i), gen(i, p - 1), gen(i))) return w;
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (auto w = test_triple(c, gen(j, p - 1), gen(j), gen(i))) return w;
      if (auto w = test_triple(c, gen(j), gen(i), gen(i, p - 1))) return w;
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < j; ++i) {
        if (auto w = test_triple(c, gen(k), gen(j), gen(i))) return w;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

ConsistencyReport consistency_check(const PcPresentation& pres) {
  const Collector c(pres);
  const int n = pres.n();
  const int p = pres.p();
  ConsistencyReport report;
  const auto order = checked_order(p, n);
  const bool exhaustive =
      order && *order <= (std::uint64_t{1} << 16) &&
      *order * *order * static_cast<std::uint64_t>(std::max(n, 1)) <= kExhaustiveBudget;

  if (exhaustive) {
    report.method = "exhaustive";
    for (std::uint64_t a = 0; a < *order; ++a) {
      const GroupElement x = decode_with(p, n, a);
      for (std::uint64_t b = 0; b < *order; ++b) {
        const GroupElement y = decode_with(p, n, b);
        for (int k = 0; k < n; ++k) {
          if (auto w = test_triple(c, x, y, GroupElement::generator(n, k))) {
            report.consistent = false;
            report.witness = std::move(w);
            return report;
          }
        }
      }
    }
    return report;
  }

  report.method = "overlap";
  if (auto w = overlap_tests(c)) {
    report.consistent = false;
    report.witness = std::move(w);
    return report;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> digit(0, p - 1);
  auto random_element = [&] {
    GroupElement x = GroupElement::identity(n);
    for (auto& e : x.exps) e = digit(rng);
    return x;
  };
  for (int t = 0; t < kRandomTriples; ++t) {
    const GroupElement x = random_element();
    const GroupElement y = random_element();
    const GroupElement z = random_element();
    if (auto w = test_triple(c, x, y, z)) {
      report.consistent = false;
      report.witness = std::move(w);
      return report;
    }
  }
  return report;
}

InconsistentPresentation::InconsistentPresentation(AssociativityWitness w)
    : Error(ErrorCode::inconsistent, "inconsistent-presentation",
            "presentation is inconsistent: (xy)z != x(yz) for x=" + w.x.str() +
                " y=" + w.y.str() + " z=" + w.z.str() + " ((xy)z=" + w.left.str() +
                ", x(yz)=" + w.right.str() + ")",
            "presentation"),
      witness_(std::move(w)) {}

std::uint64_t enumeration_cap() {
  if (const char* env = std::getenv("RAMIFY_CAP")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    throw malformed("bad-cap", "RAMIFY_CAP must be a positive integer", "RAMIFY_CAP");
  }
  return std::uint64_t{1} << 20;
}

// ---------------------------------------------------------------------------

PcGroup::PcGroup(PcPresentation pres) : collector_(pres) {
  ConsistencyReport report = consistency_check(pres);
  if (!report.consistent) throw InconsistentPresentation(std::move(*report.witness));
}

std::uint64_t PcGroup::order() const {
  const auto order = checked_order(p(), n());
  if (!order) throw Error(ErrorCode::cap_exceeded, "order-overflow", "group order exceeds 2^64");
  return *order;
}

void PcGroup::require_enumerable() const {
  const std::uint64_t cap = enumeration_cap();
  const auto order = checked_order(p(), n());
  if (!order || *order > cap) {
    throw Error(ErrorCode::cap_exceeded, "cap-exceeded",
                "group of order " + std::to_string(p()) + "^" + std::to_string(n()) +
                    " exceeds the enumeration cap " + std::to_string(cap));
  }
}

GroupElement PcGroup::inverse(const GroupElement& x) const {
  // Right-multiply by generator powers that clear x's exponents in order;
  // each step leaves earlier positions at zero.
  GroupElement z = x;
  GroupElement y = identity();
  for (int k = 0; k < n(); ++k) {
    if (z.exps[k] == 0) continue;
    const GroupElement step = GroupElement::generator(n(), k, p() - z.exps[k]);
    z = multiply(z, step);
    y = multiply(y, step);
  }
  return y;
}

GroupElement PcGroup::commutator(const GroupElement& x, const GroupElement& y) const {
  return multiply(multiply(inverse(x), inverse(y)), multiply(x, y));
}

GroupElement PcGroup::power(const GroupElement& x, long e) const {
  GroupElement base = e < 0 ? inverse(x) : x;
  unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
  GroupElement acc = identity();
  while (k) {
    if (k & 1U) acc = multiply(acc, base);
    k >>= 1U;
    if (k) base = multiply(base, base);
  }
  return acc;
}

GroupElement PcGroup::conjugate(const GroupElement& x, const GroupElement& g) const {
  return multiply(multiply(inverse(g), x), g);
}

std::uint64_t PcGroup::encode(const GroupElement& x) const {
  std::uint64_t code = 0;
  for (int k = 0; k < n(); ++k) {
    code = code * static_cast<std::uint64_t>(p()) + static_cast<std::uint64_t>(x.exps[k]);
  }
  return code;
}

GroupElement PcGroup::decode(std::uint64_t code) const { return decode_with(p(), n(), code); }

void PcGroup::check_element(const GroupElement& x, const std::string& where) const {
  if (x.size() != n()) {
    throw malformed("bad-element", "element needs " + std::to_string(n()) + " exponents", where);
  }
  for (int e : x.exps) {
    if (e < 0 || e >= p()) throw malformed("bad-element", "exponent outside [0, p)", where);
  }
}

GroupElement collect_product(const PcGroup& g, const GroupElement& x, const GroupElement& y) {
  return g.multiply(x, y);
}
GroupElement invert_element(const PcGroup& g, const GroupElement& x) { return g.inverse(x); }
GroupElement commutator(const PcGroup& g, const GroupElement& x, const GroupElement& y) {
  return g.commutator(x, y);
}
GroupElement power_p(const PcGroup& g, const GroupElement& x) { return g.power_p(x); }

PcPresentation build_heisenberg(int p) {
  PcPresentation pres(p, 3);
  pres.set_comm(1, 0, GroupElement::generator(3, 2));
  return pres;
}

}  // namespace ramify
