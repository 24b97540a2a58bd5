#include "ramify/planner.hpp"

#include <algorithm>

#include "ramify/error.hpp"

namespace ramify {

namespace {

void require_prime(long p) {
  if (!is_prime(p)) throw malformed("non-prime-p", "p=" + std::to_string(p) + " is not prime", "p");
}

// p e / (p - 1) when integral.
std::optional<mpz_class> top_break(long p, const mpz_class& e) {
  const mpz_class num = e * p;
  if (num % (p - 1) != 0) return std::nullopt;
  return mpz_class(num / (p - 1));
}

Rat to_rat(const mpz_class& z) { return Rat(z); }

}  // namespace

bool cyclic_break_admissible(const mpz_class& j, long p, const mpz_class& e, bool strict) {
  require_prime(p);
  if (j < 1) throw malformed("non-positive-break", "break must be >= 1", "j");
  if (e < 1) throw malformed("non-positive-e", "ramification index must be >= 1", "e");
  const mpz_class lhs = j * (p - 1);
  const mpz_class rhs = e * p;
  if (lhs > rhs) return false;
  if (strict && j % p == 0) return lhs == rhs;
  return true;
}

Feasibility second_step_feasible(const FeasibilityQuery& q) {
  require_prime(q.p);
  if (q.i < 1 || q.j < 1 || q.s < 1 || q.e < 1) {
    return {false, "breaks and e must be positive"};
  }
  if (q.j % q.p == 0) return {false, "p divides j"};
  if (q.s % q.p == 0) return {false, "p divides s"};
  if (!cyclic_break_admissible(q.j, q.p, q.e, false)) return {false, "j exceeds pe/(p-1)"};
  if (q.s <= q.i) {
    if (q.s > q.j) return {false, "s <= i but s > j"};
  } else {
    // i + (s - i)/p <= j
    if (q.i * q.p + (q.s - q.i) > q.j * q.p) return {false, "i + (s-i)/p exceeds j"};
  }
  if (q.i != q.j && psi_step(q.i, q.p)(Rat(q.j)) != Rat(q.s)) {
    return {false, "i != j requires s = psi_i(j)"};
  }
  return {true, {}};
}

std::string to_string(PlanKind k) {
  switch (k) {
    case PlanKind::apf: return "apf";
    case PlanKind::nonapf: return "nonapf";
    case PlanKind::custom: return "custom";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::apf: return "APF";
    case Verdict::non_apf: return "non-APF";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

std::vector<long> ScheduleRule::generate(int count) const {
  std::vector<long> out;
  long t = start;
  for (int n = 0; n < count; ++n) {
    out.push_back(t);
    t = mult * t + add;
  }
  return out;
}

mpz_class TowerPlan::level_e(int d) const {
  if (levels == LevelMode::flat) return mpz_class(e0);
  mpz_class pd;
  mpz_ui_pow_ui(pd.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d));
  return pd * e0;
}

// --- apf --------------------------------------------------------------------

namespace {

void check_common(const TowerPlan& plan) {
  require_prime(plan.p);
  if (plan.e0 < 1) throw malformed("non-positive-e", "e0 must be >= 1", "e0");
  if (plan.depth < 1) throw malformed("bad-depth", "depth must be >= 1", "depth");
}

long eps_at(const TowerPlan& plan, int n) {
  // eps for the step producing u_{2n+1}, n >= 2
  const auto k = static_cast<std::size_t>(n - 2);
  return k < plan.eps.size() ? plan.eps[k] : plan.eps.back();
}

void require_admissible(const mpz_class& j, const TowerPlan& plan, const mpz_class& e,
                        const std::string& where) {
  if (j < 1 || !cyclic_break_admissible(j, plan.p, e, plan.strict)) {
    throw infeasible("inadmissible-break",
                     "break " + j.get_str() + " is not admissible at e=" + e.get_str(), where);
  }
}

Rat eps_bound(const TowerPlan& plan) {
  long b = 0;
  for (long e : plan.eps) b = std::max(b, e);
  return Rat(plan.eps_bound.value_or(b));
}

}  // namespace

ApfResult apf_plan(const TowerPlan& plan) {
  check_common(plan);
  const long p = plan.p;
  const int N = plan.depth;
  if (plan.kind != PlanKind::apf) throw malformed("wrong-kind", "apf_plan needs an apf plan", "kind");
  if ((plan.levels == LevelMode::scaled && plan.e0 % (p - 1) != 0) ||
      (plan.levels == LevelMode::flat && (plan.e0 * p) % (p - 1) != 0)) {
    throw infeasible("non-integral-top-break", "p e0 / (p-1) must be an integer", "e0");
  }
  if (N >= 2 && plan.eps.empty()) throw malformed("missing-eps", "apf plan needs eps", "eps");
  for (std::size_t k = 0; k < plan.eps.size(); ++k) {
    if (plan.eps[k] < 1) {
      throw malformed("bad-eps", "eps must be positive", "eps[" + std::to_string(k) + "]");
    }
    if (plan.eps_bound && plan.eps[k] > *plan.eps_bound) {
      throw infeasible("eps-unbounded", "eps exceeds the declared bound",
                       "eps[" + std::to_string(k) + "]");
    }
  }

  // Base: K_1/K at depth N-1 with break i_1(3), E/K_1 one level deeper.
  const int base_depth = plan.levels == LevelMode::scaled ? N - 1 : 0;
  const mpz_class e_base = plan.level_e(base_depth);
  const mpz_class e_inner = plan.levels == LevelMode::scaled ? plan.level_e(N) : e_base * p;
  ApfBase base;
  if (plan.base) {
    base = *plan.base;
  } else {
    base.i = *top_break(p, e_inner);
    base.i1 = *top_break(p, e_base) - 1;
  }
  require_admissible(base.i1, plan, e_base, "base.i1");
  require_admissible(base.i, plan, e_inner, "base.i");
  if (base.i <= base.i1) throw infeasible("base-order", "base needs i > i1", "base");
  if ((base.i - base.i1) % p == 0) {
    throw infeasible("base-normal", "p divides i - i1; the inner step would be normal", "base");
  }

  ApfResult out;
  const Rat pr(p);
  const Rat frac = Rat(p - 1, p);
  {
    ApfStep s;
    s.index = 3;
    s.depth = base_depth;
    s.e = e_base;
    s.i1 = base.i1;
    s.u_inner = to_rat(base.i);
    s.u = to_rat(base.i1) * frac + s.u_inner / pr;
    out.steps.push_back(std::move(s));
  }
  for (int n = 2; n <= N; ++n) {
    ApfStep s;
    s.index = 2 * n + 1;
    s.depth = plan.levels == LevelMode::scaled ? N - n : 0;
    s.e = plan.level_e(s.depth);
    s.eps = eps_at(plan, n);
    s.i1 = *top_break(p, s.e) - s.eps;
    const std::string where = "step u_" + std::to_string(s.index);
    require_admissible(s.i1, plan, s.e, where);
    s.u_inner = out.steps.back().u;
    if (s.u_inner < to_rat(s.i1)) {
      throw infeasible("phi-precondition",
                       "u_" + std::to_string(s.index - 2) + " = " + s.u_inner.str() +
                           " is below i_1 = " + s.i1.get_str(),
                       where);
    }
    s.u = to_rat(s.i1) * frac + s.u_inner / pr;
    out.steps.push_back(std::move(s));
  }

  BreakSequence& seq = out.sequence;
  for (const auto& s : out.steps) {
    seq.lower.push_back(to_rat(s.i1));
    seq.upper.push_back(s.u);
    seq.flags.emplace_back();
  }
  // u_{2n+1} = (n-1) e - v_n with 0 <= v_n + u_3/p^{n-1} <= B, so the top
  // break of the horizon-n tower is at least n e0 - (e0 + B).
  const Rat bound = eps_bound(plan);
  seq.certificate.kind = Certificate::Kind::linear_growth;
  seq.certificate.slope = Rat(plan.e0);
  seq.certificate.offset = -(Rat(plan.e0) + bound);
  seq.certificate.description = "bounded eps <= " + bound.str() +
                                ": top upper break of the C_{2n+1} tower >= n*" +
                                std::to_string(plan.e0) + " - " +
                                (Rat(plan.e0) + bound).str();
  seq.verdict = verdict(seq, VerdictRule::general);
  return out;
}

ClosedFormReport closed_form_check(const ApfResult& result, const TowerPlan& plan) {
  ClosedFormReport r;
  const long p = plan.p;
  const Rat pr(p);
  const Rat frac = Rat(p - 1, p);
  if (result.steps.empty()) return r;
  const Rat& u3 = result.steps.front().u;
  for (std::size_t k = 0; k < result.steps.size(); ++k) {
    const int n = static_cast<int>(k) + 1;
    const ApfStep& step = result.steps[k];
    const Rat e(step.e);
    // sum_{m=0}^{n-2} eps_{2n+1-2m} / p^m, i.e. the eps of step n-m.
    Rat eps_sum;
    for (int m = 0; m <= n - 2; ++m) {
      eps_sum += Rat(result.steps[static_cast<std::size_t>(n - 1 - m)].eps) / pow_int(p, m);
    }
    const Rat closed = Rat(n - 1) * e - frac * eps_sum + u3 / pow_int(p, n - 1);
    r.closed_form.push_back(closed);
    if (closed != step.u && r.pass) {
      r.pass = false;
      r.failed_n = n;
    }
    r.v.push_back(Rat(n - 1) * e - step.u);
  }
  // Once eps is constant (step n+1 past the last listed entry), p^n dv_n is
  // constant as well; before that it is checked term by term.
  const std::size_t tail_from = std::max<std::size_t>(1, plan.eps.size());
  std::optional<Rat> tail;
  for (std::size_t k = 0; k + 1 < r.v.size(); ++k) {
    Rat d = r.v[k + 1] - r.v[k];
    const std::size_t n = k + 1;
    const Rat scaled = d * pow_int(p, static_cast<unsigned long>(n));
    r.cauchy_constant = std::max(r.cauchy_constant, abs(scaled));
    if (n >= tail_from) {
      if (!tail) {
        tail = scaled;
      } else if (*tail != scaled) {
        r.cauchy = false;
      }
    }
    r.dv.push_back(std::move(d));
  }
  return r;
}

// --- schedules ----------------------------------------------------------------

namespace {

// Certificate for the infinite schedule generated by `rule`, or none when the
// tail cannot be shown admissible at every level.
Certificate schedule_certificate(const TowerPlan& plan, const ScheduleRule& rule) {
  Certificate none;
  const long p = plan.p;
  const long c = rule.mult;
  const long d = rule.add;
  if (plan.levels == LevelMode::flat || c > p) {
    none.description = "schedule outgrows the admissible bound";
    return none;
  }
  if (plan.strict) {
    // residues t_n mod p follow t -> c t + d; none may vanish
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    long r = ((rule.start % p) + p) % p;
    while (!seen[static_cast<std::size_t>(r)]) {
      if (r == 0) {
        none.description = "schedule eventually hits a multiple of p";
        return none;
      }
      seen[static_cast<std::size_t>(r)] = true;
      r = (((c * r + d) % p) + p) % p;
    }
  }
  // gap_n = p^n e0/(p-1) - t_n satisfies gap_{n+1} >= p gap_n - d, so once
  // gap_n >= 0 and (p-1) gap_n >= d it never shrinks again.
  mpz_class t = rule.start;
  mpz_class level = plan.e0;  // p^{n-1} e0
  bool stable = false;
  for (int n = 1; n <= 512 && !stable; ++n) {
    const mpz_class gap_times = level * p - t * (p - 1);  // (p-1) gap_n
    if (gap_times < 0) {
      none.description = "schedule exceeds p e/(p-1) at level " + std::to_string(n);
      return none;
    }
    stable = gap_times >= d;
    t = t * c + d;
    level *= p;
  }
  if (!stable) {
    none.description = "could not certify admissibility of the schedule tail";
    return none;
  }

  Certificate cert;
  const Rat t1(rule.start);
  const Rat t2(rule.mult * rule.start + rule.add);
  if (c < p) {
    // u_{n+1} - u_n = (t_{n+1} - t_n) / p^n = (t_2 - t_1) c^{n-1} / p^n
    cert.kind = Certificate::Kind::summable;
    cert.limit = t1 + (t2 - t1) / Rat(p - c);
    cert.description = "increments (t2-t1) c^(n-1)/p^n with c=" + std::to_string(c) +
                       " < p sum to " + cert.limit.str();
  } else {
    // c = p: u_{n+1} - u_n = ((p-1) t_1 + d) / p
    const Rat delta = (Rat(p - 1) * t1 + Rat(d)) / Rat(p);
    cert.kind = Certificate::Kind::linear_growth;
    cert.slope = delta;
    cert.offset = t1 - delta;
    cert.description = "constant increment " + delta.str() + " from t_{n+1} = p t_n + " +
                       std::to_string(d);
  }
  return cert;
}

}  // namespace

BreakSequence nonapf_plan(const TowerPlan& plan) {
  check_common(plan);
  if (plan.kind == PlanKind::apf) {
    throw malformed("wrong-kind", "schedule plans need kind nonapf or custom", "kind");
  }
  std::vector<long> t = plan.schedule;
  if (plan.rule) {
    if (plan.rule->mult < 1) throw malformed("bad-rule", "rule multiplier must be >= 1", "rule");
    const std::vector<long> gen = plan.rule->generate(plan.depth);
    for (std::size_t k = 0; k < std::min(t.size(), gen.size()); ++k) {
      if (t[k] != gen[k]) {
        throw malformed("schedule-rule-mismatch", "schedule disagrees with its rule",
                        "schedule[" + std::to_string(k) + "]");
      }
    }
    t = gen;
  }
  if (t.empty()) throw malformed("empty-schedule", "schedule is empty", "schedule");

  BreakSequence seq;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::string where = "schedule[" + std::to_string(k) + "]";
    if (k > 0 && t[k] <= t[k - 1]) {
      throw infeasible("non-increasing-schedule", "schedule must increase", where);
    }
    require_admissible(mpz_class(t[k]), plan, plan.level_e(static_cast<int>(k)), where);
    std::string flag;
    if (k > 0 && (t[k] - t[k - 1]) % plan.p == 0) {
      if (plan.require_non_normal) {
        throw infeasible("normal-step", "p divides t_n - t_{n-1}", where);
      }
      flag = "p|dt";
    }
    seq.flags.push_back(std::move(flag));
    seq.lower.push_back(Rat(t[k]));
  }
  seq.upper = tower_psi(t, plan.p).upper;

  if (plan.rule) {
    seq.certificate = schedule_certificate(plan, *plan.rule);
  } else {
    seq.certificate.description = "explicit finite schedule carries no certificate";
  }
  seq.verdict = verdict(seq, plan.kind == PlanKind::nonapf ? VerdictRule::non_apf_only
                                                           : VerdictRule::general);
  if (seq.verdict == Verdict::non_apf) seq.limit_bound = seq.certificate.limit;
  return seq;
}

BreakSequence run_plan(const TowerPlan& plan) {
  if (plan.kind == PlanKind::apf) return apf_plan(plan).sequence;
  return nonapf_plan(plan);
}

Verdict verdict(const BreakSequence& seq, VerdictRule rule) {
  switch (seq.certificate.kind) {
    case Certificate::Kind::linear_growth:
      if (rule == VerdictRule::general && seq.certificate.slope.sign() > 0) return Verdict::apf;
      return Verdict::undetermined;
    case Certificate::Kind::summable:
      return Verdict::non_apf;
    case Certificate::Kind::none:
      break;
  }
  return Verdict::undetermined;
}

// --- merges ---------------------------------------------------------------

namespace {

bool apf_certified(const BreakSequence& s) {
  return verdict(s) == Verdict::apf;
}

bool non_apf_certified(const BreakSequence& s) {
  return s.certificate.kind == Certificate::Kind::summable;
}

}  // namespace

MergeResult compositum_merge(std::span<const BreakSequence> seqs) {
  if (seqs.empty()) throw malformed("empty-merge", "nothing to merge", "inputs");
  const std::size_t h = seqs.front().horizon();
  for (std::size_t k = 0; k < seqs.size(); ++k) {
    if (seqs[k].horizon() != h) {
      throw malformed("horizon-mismatch", "merged sequences need equal horizons",
                      "inputs[" + std::to_string(k) + "]");
    }
  }
  MergeResult out;
  BreakSequence& m = out.merged;
  for (std::size_t n = 0; n < h; ++n) {
    Rat best = seqs.front().upper[n];
    Rat best_lower = seqs.front().lower.size() > n ? seqs.front().lower[n] : Rat();
    bool collision = false;
    for (std::size_t a = 0; a < seqs.size(); ++a) {
      for (std::size_t b = a + 1; b < seqs.size(); ++b) {
        collision = collision || seqs[a].upper[n] == seqs[b].upper[n];
      }
      best = std::max(best, seqs[a].upper[n]);
      if (seqs[a].lower.size() > n) best_lower = std::max(best_lower, seqs[a].lower[n]);
    }
    m.upper.push_back(best);
    m.lower.push_back(best_lower);
    m.flags.emplace_back(collision ? "collision" : "");
    if (collision) out.collisions.push_back(static_cast<int>(n) + 1);
  }

  const auto apf_count = std::count_if(seqs.begin(), seqs.end(), apf_certified);
  const auto bounded_count = std::count_if(seqs.begin(), seqs.end(), non_apf_certified);
  const auto total = static_cast<std::ptrdiff_t>(seqs.size());
  if (bounded_count == total) {
    m.certificate.kind = Certificate::Kind::summable;
    m.certificate.limit = seqs.front().certificate.limit;
    for (const auto& s : seqs) m.certificate.limit = std::max(m.certificate.limit, s.certificate.limit);
    m.certificate.description = "every input is bounded; max of the bounds";
  } else if (apf_count == 1 && bounded_count == total - 1) {
    // The unbounded input eventually exceeds every bounded one, so the tail
    // is collision-free and the maximum inherits its growth.
    const auto it = std::find_if(seqs.begin(), seqs.end(), apf_certified);
    m.certificate = it->certificate;
    m.certificate.description = "max dominated by the unbounded input: " + it->certificate.description;
  } else {
    m.certificate.description = "no certificate survives the merge";
  }
  m.verdict = verdict(m);
  if (m.verdict == Verdict::non_apf) m.limit_bound = m.certificate.limit;
  return out;
}

FamilyBound tower_family_bound(long e0, int horizon) {
  FamilyBound f;
  for (int k = 1; k <= horizon; ++k) f.values.push_back(Rat((k + 1) / 2) * Rat(e0));
  f.slope = Rat(e0, 2);
  f.offset = Rat(0);
  return f;
}

BreakSequence repair_merge(const BreakSequence& base, const FamilyBound& family) {
  if (family.values.size() != base.horizon()) {
    throw malformed("horizon-mismatch", "family bound length differs from the base horizon",
                    "family");
  }
  BreakSequence out = base;
  for (std::size_t k = 0; k < base.horizon(); ++k) {
    out.upper[k] = std::max(base.upper[k], family.values[k]);
    if (family.slope) {
      const Rat floor_k = *family.slope * Rat(static_cast<long>(k) + 1) + family.offset;
      if (family.values[k] < floor_k) {
        throw malformed("family-bound-violated",
                        "family value " + family.values[k].str() + " is below its claimed bound " +
                            floor_k.str(),
                        "family[" + std::to_string(k) + "]");
      }
    }
  }
  if (family.slope && family.slope->sign() > 0 && verdict(base) != Verdict::apf) {
    out.certificate.kind = Certificate::Kind::linear_growth;
    out.certificate.slope = *family.slope;
    out.certificate.offset = family.offset;
    out.certificate.description = "repaired by a family with linear lower bound " +
                                  family.slope->str() + "*k + " + family.offset.str();
    out.limit_bound.reset();
  }
  out.verdict = verdict(out);
  return out;
}

}  // namespace ramify
