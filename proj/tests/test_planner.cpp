#include <doctest.h>

#include <random>

#include "ramify/planner.hpp"
#include "support.hpp"

using namespace ramify;
using testing_support::phi_direct;
using testing_support::psi_direct;

namespace {

Rat R(long n, long d = 1) { return Rat(n, d); }

TowerPlan apf(long p, long e0, std::vector<long> eps, int depth) {
  TowerPlan t;
  t.kind = PlanKind::apf;
  t.p = p;
  t.e0 = e0;
  t.eps = std::move(eps);
  t.depth = depth;
  return t;
}

TowerPlan scheduled(PlanKind kind, long p, long e0, ScheduleRule rule, int depth) {
  TowerPlan t;
  t.kind = kind;
  t.p = p;
  t.e0 = e0;
  t.rule = rule;
  t.depth = depth;
  return t;
}

BreakSequence seq_of(std::vector<Rat> upper) {
  BreakSequence s;
  s.lower = upper;
  s.upper = std::move(upper);
  s.flags.assign(s.upper.size(), "");
  return s;
}

std::string reason_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.reason();
  }
  return "";
}

}  // namespace

TEST_CASE("cyclic break admissibility") {
  CHECK(cyclic_break_admissible(3, 2, 2));
  CHECK_FALSE(cyclic_break_admissible(5, 2, 2));
  CHECK_FALSE(cyclic_break_admissible(2, 2, 2));
  CHECK(cyclic_break_admissible(2, 2, 2, false));
  CHECK(cyclic_break_admissible(4, 2, 2));  // p | j allowed at the bound
  CHECK(cyclic_break_admissible(3, 3, 2));
  CHECK_FALSE(cyclic_break_admissible(3, 3, 1));  // 3 * 2 > 3 * 1
  CHECK(cyclic_break_admissible(6, 3, 4));  // on the bound
  CHECK_FALSE(cyclic_break_admissible(3, 3, 4));
  CHECK(cyclic_break_admissible(3, 3, 4, false));
  CHECK(cyclic_break_admissible(mpz_class("1180591620717411303423"), 2, mpz_class("590295810358705651712")));
  CHECK_THROWS_AS(cyclic_break_admissible(0, 2, 2), Error);
  CHECK_THROWS_AS(cyclic_break_admissible(1, 4, 2), Error);
}

TEST_CASE("feasibility examples") {
  CHECK(second_step_feasible({1, 3, 5, 2, 2}).feasible);
  CHECK(second_step_feasible({1, 1, 1, 2, 2}).feasible);
  const Feasibility f = second_step_feasible({1, 1, 3, 2, 2});
  CHECK_FALSE(f.feasible);
  CHECK_FALSE(f.reason.empty());
  CHECK_FALSE(second_step_feasible({1, 2, 3, 2, 2}).feasible);  // p | j
  CHECK_FALSE(second_step_feasible({1, 5, 9, 2, 2}).feasible);  // j over the bound
}

TEST_CASE("feasibility scans") {
  for (long s = 1; s <= 20; ++s) CHECK(second_step_feasible({1, 1, s, 2, 2}).feasible == (s == 1));
  for (long p : {2L, 3L, 5L}) {
    for (long e = 1; e <= 4; ++e) {
      int feasible_distinct = 0;
      for (long i = 1; i <= 12; ++i) {
        for (long j = 1; j <= 12; ++j) {
          for (long s = 1; s <= 40; ++s) {
            const bool ok = second_step_feasible({i, j, s, p, e}).feasible;
            // independent restatement of the conditions
            bool expect = j % p != 0 && s % p != 0 && j * (p - 1) <= p * e;
            if (s <= i) {
              expect = expect && s <= j;
            } else {
              expect = expect && i * p + (s - i) <= j * p;
            }
            if (i != j) expect = expect && R(s) == psi_direct(i, p, R(j));
            CHECK(ok == expect);
            if (ok && i != j) {
              ++feasible_distinct;
              CHECK(R(s) == psi_direct(i, p, R(j)));
            }
          }
        }
      }
      if (e >= 2) CHECK(feasible_distinct > 0);
    }
  }
}

TEST_CASE("apf plan examples") {
  TowerPlan a = apf(3, 2, {}, 1);
  a.base = ApfBase{2, 4};
  const ApfResult r = apf_plan(a);
  REQUIRE(r.steps.size() == 1);
  CHECK(r.steps[0].u == R(8, 3));
  CHECK(invert(psi_step(2, 3))(R(4)) == R(8, 3));

  TowerPlan b = apf(2, 2, {1}, 2);
  b.base = ApfBase{5, 16};
  const ApfResult rb = apf_plan(b);
  REQUIRE(rb.steps.size() == 2);
  CHECK(rb.steps[0].u == R(21, 2));
  CHECK(rb.steps[1].u == R(27, 4));
  CHECK(rb.steps[1].e == 2);
  CHECK(rb.steps[1].i1 == 3);
  CHECK(rb.sequence.upper == std::vector<Rat>{R(21, 2), R(27, 4)});
  CHECK(rb.sequence.verdict == Verdict::apf);

  // flat levels regression fixture
  TowerPlan f = apf(2, 2, {1}, 2);
  f.levels = LevelMode::flat;
  f.base = ApfBase{1, 8};
  const ApfResult rf = apf_plan(f);
  CHECK(rf.steps[0].u == R(9, 2));
  CHECK(rf.steps[1].u == R(15, 4));
  const ClosedFormReport cf = closed_form_check(rf, f);
  CHECK(cf.pass);
  CHECK(cf.v[1] == R(-7, 4));
}

TEST_CASE("apf plan errors") {
  TowerPlan big = apf(2, 2, {1, 1, 1}, 10);
  big.base = ApfBase{5, 16};
  CHECK(reason_of([&] { apf_plan(big); }) == "inadmissible-break");
  big.strict = false;
  CHECK(reason_of([&] { apf_plan(big); }) == "phi-precondition");

  TowerPlan odd = apf(3, 1, {1}, 3);
  CHECK(reason_of([&] { apf_plan(odd); }) == "non-integral-top-break");

  TowerPlan normal = apf(2, 2, {1}, 2);
  normal.base = ApfBase{5, 7};
  normal.strict = false;
  CHECK(reason_of([&] { apf_plan(normal); }).size() > 0);

  TowerPlan same = apf(3, 2, {1}, 2);
  same.base = ApfBase{5, 8};  // 3 | (8 - 5)
  CHECK(reason_of([&] { apf_plan(same); }) == "base-normal");

  TowerPlan noeps = apf(2, 2, {}, 3);
  CHECK(reason_of([&] { apf_plan(noeps); }) == "missing-eps");

  TowerPlan bound = apf(2, 2, {1, 3}, 3);
  bound.eps_bound = 2;
  CHECK(reason_of([&] { apf_plan(bound); }) == "eps-unbounded");

  TowerPlan big_eps = apf(2, 2, {1000}, 3);
  CHECK(reason_of([&] { apf_plan(big_eps); }) != "");
}

TEST_CASE("apf recursion agrees with the Herbrand module and a hand loop") {
  for (long p : {2L, 3L, 5L}) {
    for (int depth : {1, 2, 5, 15}) {
      TowerPlan plan = apf(p, 2 * (p - 1), {1, p + 1, 1, 2 * p - 1}, depth);
      const ApfResult r = apf_plan(plan);
      REQUIRE(r.steps.size() == static_cast<std::size_t>(depth));
      Rat u;
      for (std::size_t k = 0; k < r.steps.size(); ++k) {
        const ApfStep& s = r.steps[k];
        CHECK(s.u == invert(psi_step(s.i1.get_si(), p))(s.u_inner));
        CHECK(s.u == phi_direct(s.i1.get_si(), p, s.u_inner));
        CHECK(cyclic_break_admissible(s.i1, p, s.e));
        if (k > 0) {
          CHECK(s.u_inner == u);
          CHECK(s.u_inner >= Rat(s.i1));
          // i_1 = p e/(p-1) - eps at this depth
          CHECK(Rat(s.i1) == Rat(s.e) * R(p) / R(p - 1) - R(s.eps));
          CHECK(s.e == plan.level_e(depth - static_cast<int>(k) - 1));
        }
        u = s.u;
      }
    }
  }
}

TEST_CASE("closed form and Cauchy certificate") {
  TowerPlan plan = apf(2, 2, {1}, 15);
  const ApfResult r = apf_plan(plan);
  const ClosedFormReport cf = closed_form_check(r, plan);
  CHECK(cf.pass);
  CHECK_FALSE(cf.failed_n);
  CHECK(cf.cauchy);
  REQUIRE(cf.dv.size() == 14);
  for (std::size_t k = 0; k + 1 < cf.dv.size(); ++k) CHECK(abs(cf.dv[k + 1]) * R(2) <= abs(cf.dv[k]));
  // eps constant c: dv_n = (p-1)(c + u_3)/p^n exactly
  const Rat u3 = r.steps[0].u;
  for (std::size_t k = 0; k < cf.dv.size(); ++k) {
    CHECK(cf.dv[k] == (R(1) + u3) / pow_int(2, static_cast<unsigned long>(k + 1)));
  }
  // mixed eps still matches the closed form
  TowerPlan mixed = apf(3, 4, {1, 2, 4, 1, 2}, 12);
  const ApfResult rm = apf_plan(mixed);
  CHECK(closed_form_check(rm, mixed).pass);
  const ClosedFormReport cm = closed_form_check(rm, mixed);
  CHECK(cm.cauchy);
  for (std::size_t k = 0; k < cm.dv.size(); ++k) {
    CHECK(abs(cm.dv[k]) * pow_int(3, static_cast<unsigned long>(k + 1)) <= cm.cauchy_constant);
  }
  // alternating eps with no constant tail inside the horizon still has a
  // constant tail from the repeated last entry
  TowerPlan alt = apf(2, 2, {1, 3, 1, 3, 1, 3}, 15);
  CHECK(closed_form_check(apf_plan(alt), alt).cauchy);

  ApfResult perturbed = r;
  perturbed.steps[1].u += R(1, 8);
  const ClosedFormReport bad = closed_form_check(perturbed, plan);
  CHECK_FALSE(bad.pass);
  REQUIRE(bad.failed_n);
  CHECK(*bad.failed_n == 2);
  CHECK_FALSE(bad.cauchy);
  CHECK(cf.cauchy_constant == R(1) + u3);

  TowerPlan one = apf(5, 4, {2}, 1);
  CHECK(closed_form_check(apf_plan(one), one).pass);
}

TEST_CASE("apf certificate bounds the top break linearly") {
  // u_{2n+1} of the horizon-n plan against n e0 - (e0 + B)
  for (long p : {2L, 3L}) {
    const long e0 = 2 * (p - 1);
    for (int n = 1; n <= 12; ++n) {
      TowerPlan plan = apf(p, e0, {1, p + 1}, n);
      const ApfResult r = apf_plan(plan);
      const Certificate& c = r.sequence.certificate;
      CHECK(c.kind == Certificate::Kind::linear_growth);
      CHECK(r.steps.back().u >= c.slope * R(n) + c.offset);
    }
  }
}

TEST_CASE("non-APF schedule fixture") {
  const TowerPlan plan = scheduled(PlanKind::nonapf, 2, 2, ScheduleRule::linear(2, -1), 20);
  const BreakSequence s = nonapf_plan(plan);
  REQUIRE(s.upper.size() == 20);
  for (int n = 1; n <= 20; ++n) {
    CHECK(s.upper[static_cast<std::size_t>(n - 1)] == R(3) - Rat(1) / pow_int(2, static_cast<unsigned long>(n - 1)) * R(2));
    CHECK(s.lower[static_cast<std::size_t>(n - 1)] == R(2 * n - 1));
  }
  CHECK(s.upper[3] == R(11, 4));
  CHECK(s.verdict == Verdict::non_apf);
  REQUIRE(s.limit_bound);
  CHECK(*s.limit_bound == R(3));
  for (std::size_t k = 0; k + 1 < s.upper.size(); ++k) {
    CHECK(s.upper[k] < s.upper[k + 1]);
    CHECK(s.upper[k + 1] <= *s.limit_bound);
  }
  CHECK(s.flags[0].empty());
  CHECK(s.flags[1] == "p|dt");
}

TEST_CASE("doubling schedule") {
  const ScheduleRule rule{1, 2, 1};
  CHECK(rule.generate(4) == std::vector<long>{1, 3, 7, 15});
  const BreakSequence c = nonapf_plan(scheduled(PlanKind::custom, 2, 2, rule, 12));
  for (int n = 1; n <= 12; ++n) CHECK(c.upper[static_cast<std::size_t>(n - 1)] == R(n));
  CHECK(c.verdict == Verdict::apf);
  CHECK(c.certificate.kind == Certificate::Kind::linear_growth);
  CHECK(c.certificate.slope == R(1));
  const BreakSequence u = nonapf_plan(scheduled(PlanKind::nonapf, 2, 2, rule, 12));
  CHECK(u.verdict == Verdict::undetermined);
  CHECK(verdict(u, VerdictRule::general) == Verdict::apf);
}

TEST_CASE("schedule errors and certificates") {
  TowerPlan bad;
  bad.kind = PlanKind::nonapf;
  bad.p = 2;
  bad.e0 = 2;
  bad.schedule = {1, 2};
  bad.depth = 2;
  CHECK(reason_of([&] { nonapf_plan(bad); }) == "inadmissible-break");
  bad.schedule = {3, 3};
  CHECK(reason_of([&] { nonapf_plan(bad); }) == "non-increasing-schedule");
  bad.schedule = {5};
  bad.e0 = 1;
  CHECK(reason_of([&] { nonapf_plan(bad); }) == "inadmissible-break");

  TowerPlan strict = scheduled(PlanKind::nonapf, 2, 2, ScheduleRule::linear(2, -1), 5);
  strict.require_non_normal = true;
  CHECK(reason_of([&] { nonapf_plan(strict); }) == "normal-step");

  // explicit lists carry no certificate
  TowerPlan list;
  list.kind = PlanKind::nonapf;
  list.p = 2;
  list.e0 = 2;
  list.schedule = {1, 3, 5, 7};
  list.depth = 4;
  const BreakSequence ls = nonapf_plan(list);
  CHECK(ls.upper == std::vector<Rat>{R(1), R(2), R(5, 2), R(11, 4)});
  CHECK(ls.verdict == Verdict::undetermined);

  // a linear schedule that eventually outgrows e = e0 in flat mode
  TowerPlan flat = scheduled(PlanKind::nonapf, 2, 8, ScheduleRule::linear(2, -1), 4);
  flat.levels = LevelMode::flat;
  CHECK(nonapf_plan(flat).verdict == Verdict::undetermined);

  // p = 3, t_n = 3n - 1: residues never vanish
  const BreakSequence p3 = nonapf_plan(scheduled(PlanKind::nonapf, 3, 2, ScheduleRule::linear(3, -1), 10));
  CHECK(p3.verdict == Verdict::non_apf);
  CHECK(*p3.limit_bound == R(2) + R(3, 2));
  for (const auto& u : p3.upper) CHECK(u <= *p3.limit_bound);

  // p = 3, t_n = 4n - 3 reaches 9 at n = 3
  CHECK(reason_of([&] { nonapf_plan(scheduled(PlanKind::nonapf, 3, 2, ScheduleRule::linear(4, -3), 3)); }) ==
        "inadmissible-break");
  // a multiplier above p outgrows the admissible bound
  const BreakSequence fast = nonapf_plan(scheduled(PlanKind::custom, 2, 4, ScheduleRule{1, 3, 2}, 2));
  CHECK(fast.verdict == Verdict::undetermined);
}

TEST_CASE("summable certificate is a true bound on long horizons") {
  for (long p : {2L, 3L, 5L}) {
    for (long a = 1; a <= 6; ++a) {
      if (a % p == 0) continue;
      TowerPlan plan = scheduled(PlanKind::nonapf, p, 12, ScheduleRule::linear(a, 1), 40);
      plan.strict = false;
      const BreakSequence s = nonapf_plan(plan);
      REQUIRE(s.verdict == Verdict::non_apf);
      for (const auto& u : s.upper) CHECK(u < *s.limit_bound);
      // the gap to the bound shrinks geometrically
      CHECK(*s.limit_bound - s.upper.back() == R(a) / (R(p - 1) * pow_int(p, 39)));
    }
  }
}

TEST_CASE("verdict policy") {
  BreakSequence raw = seq_of({R(1), R(2), R(3)});
  CHECK(verdict(raw) == Verdict::undetermined);
  raw.certificate.kind = Certificate::Kind::linear_growth;
  raw.certificate.slope = R(1);
  CHECK(verdict(raw) == Verdict::apf);
  CHECK(verdict(raw, VerdictRule::non_apf_only) == Verdict::undetermined);
  raw.certificate.slope = R(0);
  CHECK(verdict(raw) == Verdict::undetermined);
  BreakSequence b = seq_of({R(1), R(2), R(5, 2)});
  b.certificate.kind = Certificate::Kind::summable;
  b.certificate.limit = R(3);
  CHECK(verdict(b) == Verdict::non_apf);
  CHECK(to_string(Verdict::non_apf) == "non-APF");
  CHECK(to_string(PlanKind::custom) == "custom");
}

TEST_CASE("compositum merge examples") {
  const std::vector<BreakSequence> two{seq_of({R(1), R(2), R(5, 2)}), seq_of({R(1), R(2), R(3)})};
  const MergeResult m = compositum_merge(two);
  CHECK(m.merged.upper == std::vector<Rat>{R(1), R(2), R(3)});
  CHECK(m.collisions == std::vector<int>{1, 2});
  CHECK(m.merged.flags == std::vector<std::string>{"collision", "collision", ""});

  const std::vector<BreakSequence> one{seq_of({R(1), R(7, 3)})};
  const MergeResult single = compositum_merge(one);
  CHECK(single.merged.upper == one[0].upper);
  CHECK(single.collisions.empty());

  const std::vector<BreakSequence> mismatch{seq_of({R(1)}), seq_of({R(1), R(2)})};
  CHECK(reason_of([&] { compositum_merge(mismatch); }) == "horizon-mismatch");
  CHECK(reason_of([&] { compositum_merge(std::vector<BreakSequence>{}); }) == "empty-merge");
}

TEST_CASE("merge verdicts") {
  const BreakSequence bounded = nonapf_plan(scheduled(PlanKind::nonapf, 2, 2, ScheduleRule::linear(2, -1), 6));
  const BreakSequence growing = nonapf_plan(scheduled(PlanKind::custom, 2, 2, ScheduleRule{1, 2, 1}, 6));
  const std::vector<BreakSequence> mixed{bounded, growing};
  const MergeResult m = compositum_merge(mixed);
  CHECK(m.merged.verdict == Verdict::apf);
  CHECK(m.merged.upper == growing.upper);

  const BreakSequence other = nonapf_plan(scheduled(PlanKind::nonapf, 2, 2, ScheduleRule::linear(4, -3), 6));
  const std::vector<BreakSequence> both{bounded, other};
  const MergeResult mb = compositum_merge(both);
  CHECK(mb.merged.verdict == Verdict::non_apf);
  CHECK(*mb.merged.limit_bound == std::max(*bounded.limit_bound, *other.limit_bound));
  for (std::size_t k = 0; k < mb.merged.upper.size(); ++k) CHECK(mb.merged.upper[k] <= *mb.merged.limit_bound);

  const std::vector<BreakSequence> two_apf{growing, growing};
  CHECK(compositum_merge(two_apf).merged.verdict == Verdict::undetermined);
  const std::vector<BreakSequence> with_raw{bounded, seq_of(bounded.upper)};
  CHECK(compositum_merge(with_raw).merged.verdict == Verdict::undetermined);
}

TEST_CASE("compositum merge algebra on random inputs") {
  std::mt19937 rng(31);
  auto random_seq = [&](std::size_t h) {
    std::vector<Rat> u;
    for (std::size_t k = 0; k < h; ++k) u.push_back(Rat(static_cast<long>(rng() % 6), 1 + static_cast<long>(rng() % 2)));
    return seq_of(u);
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng() % 8;
    const BreakSequence a = random_seq(h), b = random_seq(h), c = random_seq(h);
    auto merge = [](std::vector<BreakSequence> v) { return compositum_merge(v); };
    CHECK(merge({a, a}).merged.upper == a.upper);
    CHECK(merge({a, b}).merged.upper == merge({b, a}).merged.upper);
    CHECK(merge({a, b}).collisions == merge({b, a}).collisions);
    CHECK(merge({merge({a, b}).merged, c}).merged.upper == merge({a, merge({b, c}).merged}).merged.upper);
    CHECK(merge({a, b, c}).merged.upper == merge({merge({a, b}).merged, c}).merged.upper);
    // collisions exactly where two inputs agree
    const MergeResult m = merge({a, b, c});
    std::vector<int> expect;
    for (std::size_t k = 0; k < h; ++k) {
      if (a.upper[k] == b.upper[k] || a.upper[k] == c.upper[k] || b.upper[k] == c.upper[k]) {
        expect.push_back(static_cast<int>(k) + 1);
      }
      CHECK(m.merged.upper[k] == std::max({a.upper[k], b.upper[k], c.upper[k]}));
    }
    CHECK(m.collisions == expect);
  }
}

TEST_CASE("repair merge") {
  const BreakSequence base = nonapf_plan(scheduled(PlanKind::nonapf, 2, 2, ScheduleRule::linear(2, -1), 8));
  REQUIRE(base.verdict == Verdict::non_apf);
  FamilyBound linear;
  for (int k = 1; k <= 8; ++k) linear.values.push_back(R(k));
  linear.slope = R(1);
  linear.offset = R(0);
  const BreakSequence up = repair_merge(base, linear);
  CHECK(up.verdict == Verdict::apf);
  CHECK_FALSE(up.limit_bound);
  for (std::size_t k = 0; k < 8; ++k) CHECK(up.upper[k] == std::max(base.upper[k], linear.values[k]));

  FamilyBound zero;
  zero.values.assign(8, R(0));
  const BreakSequence same = repair_merge(base, zero);
  CHECK(same.upper == base.upper);
  CHECK(same.verdict == base.verdict);

  const BreakSequence growing = nonapf_plan(scheduled(PlanKind::custom, 2, 2, ScheduleRule{1, 2, 1}, 8));
  CHECK(repair_merge(growing, linear).verdict == Verdict::apf);
  CHECK(repair_merge(growing, zero).verdict == Verdict::apf);

  FamilyBound short_family;
  short_family.values = {R(1)};
  CHECK(reason_of([&] { repair_merge(base, short_family); }) == "horizon-mismatch");

  FamilyBound liar = linear;
  liar.values[3] = R(1);
  CHECK(reason_of([&] { repair_merge(base, liar); }) == "family-bound-violated");

  const FamilyBound cor = tower_family_bound(2, 6);
  CHECK(cor.values == std::vector<Rat>{R(2), R(2), R(4), R(4), R(6), R(6)});
  CHECK(*cor.slope == R(1));
  const BreakSequence fixed = repair_merge(nonapf_plan(scheduled(PlanKind::nonapf, 2, 2, ScheduleRule::linear(2, -1), 6)), cor);
  CHECK(fixed.verdict == Verdict::apf);
}
