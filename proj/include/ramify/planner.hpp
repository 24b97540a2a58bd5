#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ramify/herbrand.hpp"

namespace ramify {

// --- admissibility --------------------------------------------------------

// Whether a cyclic degree-p totally ramified extension of a field with
// absolute ramification index e can have lower break j:
//   j <= p e / (p - 1), and (strict mode) p does not divide j unless
//   j = p e / (p - 1) exactly.
bool cyclic_break_admissible(const mpz_class& j, long p, const mpz_class& e, bool strict = true);
inline bool cyclic_break_admissible(long j, long p, long e, bool strict = true) {
  return cyclic_break_admissible(mpz_class(j), p, mpz_class(e), strict);
}

struct FeasibilityQuery {
  long i = 0;  // break of the given cyclic L/K
  long j = 0;  // requested break of L'/K
  long s = 0;  // requested break of LL'/L
  long p = 2;
  long e = 1;  // absolute ramification index of K
};

struct Feasibility {
  bool feasible = false;
  std::string reason;  // empty when feasible
};

// Conditions under which a second cyclic step with breaks (j, s) exists
// over a cyclic L/K with break i.
Feasibility second_step_feasible(const FeasibilityQuery& q);

// --- plans and break sequences -------------------------------------------

enum class PlanKind { apf, nonapf, custom };
enum class LevelMode { scaled, flat };
enum class Verdict { apf, non_apf, undetermined };
enum class VerdictRule { general, non_apf_only };

std::string to_string(PlanKind k);
std::string to_string(Verdict v);

// Structural reason a verdict can be asserted about an infinite tower.
struct Certificate {
  enum class Kind { none, linear_growth, summable };
  Kind kind = Kind::none;
  Rat slope;   // linear_growth: u_n >= slope * n + offset for every n
  Rat offset;
  Rat limit;   // summable: sup u_n <= limit
  std::string description;
};

struct BreakSequence {
  std::vector<Rat> lower;
  std::vector<Rat> upper;
  std::vector<std::string> flags;  // one per index, "" when clean
  Verdict verdict = Verdict::undetermined;
  std::optional<Rat> limit_bound;
  Certificate certificate;

  std::size_t horizon() const { return upper.size(); }
};

// Schedule generator: t_1 = start, t_{n+1} = mult * t_n + add.
// A linear schedule t_n = a n + b is mult = 1, add = a, start = a + b.
struct ScheduleRule {
  long start = 1;
  long mult = 1;
  long add = 1;

  static ScheduleRule linear(long a, long b) { return {a + b, 1, a}; }
  std::vector<long> generate(int count) const;
};

struct ApfBase {
  mpz_class i1;  // i_1(3)
  mpz_class i;   // break of the inner step over K_1
};

struct TowerPlan {
  PlanKind kind = PlanKind::apf;
  long p = 2;
  long e0 = 1;
  int depth = 1;  // horizon N
  LevelMode levels = LevelMode::scaled;
  bool strict = true;  // strengthened admissibility

  // apf
  std::vector<long> eps;        // eps_5, eps_7, ...; the last entry repeats
  std::optional<long> eps_bound;
  std::optional<ApfBase> base;  // defaults to the largest admissible pair

  // nonapf / custom
  std::vector<long> schedule;
  std::optional<ScheduleRule> rule;
  bool require_non_normal = false;  // reject p | (t_n - t_{n-1}) instead of flagging it

  // Absolute ramification index at nesting depth d (p^d e0, or e0 when flat).
  mpz_class level_e(int d) const;
};

// One recursion step u = i_1 (p-1)/p + u_inner / p of an apf plan.
struct ApfStep {
  int index = 3;  // 2n + 1: this step produces u_{2n+1}
  int depth = 0;  // nesting depth of the cyclic step's base field
  mpz_class e;    // absolute ramification index at that depth
  mpz_class i1;
  long eps = 0;   // 0 for the base step
  Rat u_inner;    // u_{2n-1} (base step: the inner break i)
  Rat u;
};

struct ApfResult {
  std::vector<ApfStep> steps;  // u_3, u_5, ..., u_{2N+1}
  BreakSequence sequence;
};

// Evaluates the recursion with depth-scaled levels. Throws
// Error(infeasible) on inadmissible breaks or when u_inner < i_1.
ApfResult apf_plan(const TowerPlan& plan);

struct ClosedFormReport {
  bool pass = true;
  std::optional<int> failed_n;  // first n with u_{2n+1} != closed form
  std::vector<Rat> closed_form;
  std::vector<Rat> v;           // v_n = (n-1) e_level - u_{2n+1}
  std::vector<Rat> dv;          // v_{n+1} - v_n
  Rat cauchy_constant;          // C in |dv_n| <= C / p^n, max over the horizon
  bool cauchy = true;           // p^n dv_n constant past the last eps change
};

ClosedFormReport closed_form_check(const ApfResult& result, const TowerPlan& plan);

// Schedule-driven tower (kinds nonapf and custom): upper breaks through
// tower_psi, verdict from the schedule rule when one is given.
BreakSequence nonapf_plan(const TowerPlan& plan);

// Dispatch on plan.kind.
BreakSequence run_plan(const TowerPlan& plan);

// APF needs a positive linear_growth certificate (and rule general);
// non-APF needs a summable certificate; anything else is undetermined.
Verdict verdict(const BreakSequence& seq, VerdictRule rule = VerdictRule::general);

// --- merges ---------------------------------------------------------------

struct MergeResult {
  BreakSequence merged;
  std::vector<int> collisions;  // 1-based indices where two inputs agree
};

// Index-wise maximum of equal-horizon sequences.
MergeResult compositum_merge(std::span<const BreakSequence> seqs);

struct FamilyBound {
  std::vector<Rat> values;
  std::optional<Rat> slope;   // claimed values_k >= slope * k + offset
  Rat offset;
};

// The bound ceil(k/2) * e0, with slope e0 / 2.
FamilyBound tower_family_bound(long e0, int horizon);

BreakSequence repair_merge(const BreakSequence& base, const FamilyBound& family);

}  // namespace ramify
