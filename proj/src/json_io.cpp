#include "ramify/json_io.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace ramify::io {

namespace {

std::string at(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

std::string at(const std::string& where, std::size_t k) {
  return where + "[" + std::to_string(k) + "]";
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw malformed("expected-object", "expected a JSON object", where);
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw malformed("unknown-key", "unexpected key '" + k + "'", at(where, k));
  }
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw malformed("missing-key", std::string("missing '") + key + "'", at(where, key));
  return *it;
}

long as_long(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw malformed("expected-integer", "expected an integer", where);
  return j.get<long>();
}

bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw malformed("expected-boolean", "expected true or false", where);
  return j.get<bool>();
}

const json& as_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw malformed("expected-array", "expected a JSON array", where);
  return j;
}

std::vector<long> long_list(const json& j, const std::string& where) {
  std::vector<long> out;
  for (std::size_t k = 0; k < as_array(j, where).size(); ++k) out.push_back(as_long(j[k], at(where, k)));
  return out;
}

mpz_class as_mpz(const json& j, const std::string& where) {
  const Rat r = rat_from_json(j, where);
  if (!r.is_integer()) throw malformed("expected-integer", "expected an integer", where);
  return r.num();
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw malformed("bad-json", e.what(), source + ":byte " + std::to_string(e.byte));
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw malformed("unreadable-file", "cannot open " + path, path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

Rat rat_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (j.is_string()) {
    try {
      return Rat::parse(j.get<std::string>());
    } catch (const Error& e) {
      throw Error(e.code(), e.reason(), e.what(), where);
    }
  }
  throw malformed("bad-rational", "expected \"num/den\" or an integer", where);
}

json to_json(const Rat& r) { return r.str(); }

PLFunc plfunc_from_json(const json& j, const std::string& where) {
  only_keys(j, {"breakpoints", "slopes"}, where);
  std::vector<Breakpoint> bps;
  const auto bw = at(where, "breakpoints");
  const json& jb = as_array(need(j, "breakpoints", where), bw);
  for (std::size_t k = 0; k < jb.size(); ++k) {
    if (!jb[k].is_array() || jb[k].size() != 2) {
      throw malformed("bad-breakpoint", "breakpoint must be [x, y]", at(bw, k));
    }
    bps.push_back({rat_from_json(jb[k][0], at(bw, k)), rat_from_json(jb[k][1], at(bw, k))});
  }
  std::vector<Rat> slopes;
  const auto sw = at(where, "slopes");
  const json& js = as_array(need(j, "slopes", where), sw);
  for (std::size_t k = 0; k < js.size(); ++k) slopes.push_back(rat_from_json(js[k], at(sw, k)));
  try {
    return PLFunc(std::move(bps), std::move(slopes));
  } catch (const Error& e) {
    throw Error(e.code(), e.reason(), e.what(), where.empty() ? e.location() : where);
  }
}

json to_json(const PLFunc& f) {
  json bps = json::array();
  for (const auto& b : f.breakpoints()) bps.push_back(json::array({b.x.str(), b.y.str()}));
  json slopes = json::array();
  for (const auto& s : f.slopes()) slopes.push_back(s.str());
  return json{{"breakpoints", bps}, {"slopes", slopes}};
}

namespace {

// {"3": 1} -> exponent vector; keys are 1-based generator indices
GroupElement rhs_from_json(const json& j, int n, const std::string& where) {
  if (!j.is_object()) throw malformed("expected-object", "rhs must map generator index to exponent", where);
  GroupElement g = GroupElement::identity(n);
  for (const auto& [k, v] : j.items()) {
    int idx = 0;
    try {
      std::size_t used = 0;
      idx = std::stoi(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      throw malformed("bad-generator-index", "rhs key must be a generator index", at(where, k));
    }
    if (idx < 1 || idx > n) throw malformed("bad-generator-index", "index out of range", at(where, k));
    g.exps[static_cast<std::size_t>(idx - 1)] = static_cast<int>(as_long(v, at(where, k)));
  }
  return g;
}

json rhs_to_json(const GroupElement& g) {
  json out = json::object();
  for (int k = 0; k < g.size(); ++k) {
    if (g.exps[static_cast<std::size_t>(k)] != 0) out[std::to_string(k + 1)] = g.exps[static_cast<std::size_t>(k)];
  }
  return out;
}

int generator_index(const json& j, int n, const std::string& where) {
  const long v = as_long(j, where);
  if (v < 1 || v > n) throw malformed("bad-generator-index", "generator index out of range", where);
  return static_cast<int>(v - 1);
}

}  // namespace

PcPresentation presentation_from_json(const json& j) {
  only_keys(j, {"p", "n", "power", "comm"}, "");
  const long p = as_long(need(j, "p", ""), "p");
  const long n = as_long(need(j, "n", ""), "n");
  if (n < 1 || n > 64) throw malformed("bad-n", "n must be in [1, 64]", "n");
  PcPresentation pres(static_cast<int>(p), static_cast<int>(n));
  const int ni = static_cast<int>(n);
  if (j.contains("power")) {
    const json& pw = as_array(j["power"], "power");
    for (std::size_t k = 0; k < pw.size(); ++k) {
      const auto w = at("power", k);
      only_keys(pw[k], {"j", "rhs"}, w);
      const int jj = generator_index(need(pw[k], "j", w), ni, at(w, "j"));
      pres.set_power(jj, rhs_from_json(need(pw[k], "rhs", w), ni, at(w, "rhs")));
    }
  }
  if (j.contains("comm")) {
    const json& cm = as_array(j["comm"], "comm");
    for (std::size_t k = 0; k < cm.size(); ++k) {
      const auto w = at("comm", k);
      only_keys(cm[k], {"j", "i", "rhs"}, w);
      const int jj = generator_index(need(cm[k], "j", w), ni, at(w, "j"));
      const int ii = generator_index(need(cm[k], "i", w), ni, at(w, "i"));
      if (ii >= jj) throw malformed("bad-commutator-pair", "comm needs i < j", w);
      pres.set_comm(jj, ii, rhs_from_json(need(cm[k], "rhs", w), ni, at(w, "rhs")));
    }
  }
  return pres;
}

json to_json(const PcPresentation& pres) {
  json power = json::array();
  json comm = json::array();
  for (int j = 0; j < pres.n(); ++j) {
    power.push_back({{"j", j + 1}, {"rhs", rhs_to_json(pres.power_rhs(j))}});
    for (int i = 0; i < j; ++i) {
      const GroupElement& r = pres.comm_rhs(j, i);
      if (!r.is_identity()) comm.push_back({{"j", j + 1}, {"i", i + 1}, {"rhs", rhs_to_json(r)}});
    }
  }
  return json{{"p", pres.p()}, {"n", pres.n()}, {"power", power}, {"comm", comm}};
}

GroupElement element_from_json(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw malformed("bad-element", "element must be an exponent vector of length " + std::to_string(n), where);
  }
  std::vector<int> e;
  for (std::size_t k = 0; k < j.size(); ++k) e.push_back(static_cast<int>(as_long(j[k], at(where, k))));
  return GroupElement(std::move(e));
}

json to_json(const GroupElement& x) { return x.exps; }

IgAssignment ig_from_json(const json& j, int n) {
  only_keys(j, {"ig", "default"}, "");
  IgAssignment out;
  if (j.contains("default")) out.default_value = as_long(j["default"], "default");
  if (j.contains("ig")) {
    const json& a = as_array(j["ig"], "ig");
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto w = at("ig", k);
      only_keys(a[k], {"element", "value"}, w);
      out.entries.push_back({element_from_json(need(a[k], "element", w), n, at(w, "element")),
                             as_long(need(a[k], "value", w), at(w, "value"))});
    }
  }
  return out;
}

TowerPlan plan_from_json(const json& j) {
  only_keys(j, {"kind", "p", "e0", "depth", "levels", "strict", "eps", "eps_bound", "base", "schedule",
                "rule", "require_non_normal"},
            "");
  TowerPlan plan;
  const json& kind = need(j, "kind", "");
  if (kind == "apf") {
    plan.kind = PlanKind::apf;
  } else if (kind == "nonapf") {
    plan.kind = PlanKind::nonapf;
  } else if (kind == "custom") {
    plan.kind = PlanKind::custom;
  } else {
    throw malformed("bad-kind", "kind must be apf, nonapf or custom", "kind");
  }
  plan.p = as_long(need(j, "p", ""), "p");
  plan.e0 = j.contains("e0") ? as_long(j["e0"], "e0") : 1;
  if (j.contains("levels")) {
    if (j["levels"] == "scaled") {
      plan.levels = LevelMode::scaled;
    } else if (j["levels"] == "flat") {
      plan.levels = LevelMode::flat;
    } else {
      throw malformed("bad-levels", "levels must be scaled or flat", "levels");
    }
  }
  if (j.contains("strict")) plan.strict = as_bool(j["strict"], "strict");
  if (j.contains("require_non_normal")) {
    plan.require_non_normal = as_bool(j["require_non_normal"], "require_non_normal");
  }
  if (j.contains("eps")) plan.eps = long_list(j["eps"], "eps");
  if (j.contains("eps_bound")) plan.eps_bound = as_long(j["eps_bound"], "eps_bound");
  if (j.contains("base")) {
    only_keys(j["base"], {"i1", "i"}, "base");
    plan.base = ApfBase{as_mpz(need(j["base"], "i1", "base"), "base.i1"),
                        as_mpz(need(j["base"], "i", "base"), "base.i")};
  }
  if (j.contains("schedule")) plan.schedule = long_list(j["schedule"], "schedule");
  if (j.contains("rule")) {
    const json& r = j["rule"];
    if (r.is_object() && r.contains("a")) {
      only_keys(r, {"a", "b"}, "rule");
      plan.rule = ScheduleRule::linear(as_long(need(r, "a", "rule"), "rule.a"),
                                       as_long(need(r, "b", "rule"), "rule.b"));
    } else {
      only_keys(r, {"start", "mult", "add"}, "rule");
      plan.rule = ScheduleRule{as_long(need(r, "start", "rule"), "rule.start"),
                               as_long(need(r, "mult", "rule"), "rule.mult"),
                               as_long(need(r, "add", "rule"), "rule.add")};
    }
  }
  if (j.contains("depth")) {
    plan.depth = static_cast<int>(as_long(j["depth"], "depth"));
  } else if (plan.kind != PlanKind::apf && !plan.schedule.empty()) {
    plan.depth = static_cast<int>(plan.schedule.size());
  } else {
    throw malformed("missing-key", "missing 'depth'", "depth");
  }
  if (plan.depth < 1 || plan.depth > 4096) throw malformed("bad-depth", "depth must be in [1, 4096]", "depth");
  return plan;
}

json to_json(const Certificate& c) {
  json out;
  switch (c.kind) {
    case Certificate::Kind::none: out["kind"] = "none"; break;
    case Certificate::Kind::linear_growth:
      out["kind"] = "linear_growth";
      out["slope"] = c.slope.str();
      out["offset"] = c.offset.str();
      break;
    case Certificate::Kind::summable:
      out["kind"] = "summable";
      out["limit"] = c.limit.str();
      break;
  }
  out["description"] = c.description;
  return out;
}

namespace {

Certificate certificate_from_json(const json& j, const std::string& where) {
  only_keys(j, {"kind", "slope", "offset", "limit", "description"}, where);
  Certificate c;
  const json& kind = need(j, "kind", where);
  if (kind == "none") {
    c.kind = Certificate::Kind::none;
  } else if (kind == "linear_growth") {
    c.kind = Certificate::Kind::linear_growth;
    c.slope = rat_from_json(need(j, "slope", where), at(where, "slope"));
    c.offset = rat_from_json(need(j, "offset", where), at(where, "offset"));
  } else if (kind == "summable") {
    c.kind = Certificate::Kind::summable;
    c.limit = rat_from_json(need(j, "limit", where), at(where, "limit"));
  } else {
    throw malformed("bad-certificate", "unknown certificate kind", at(where, "kind"));
  }
  if (j.contains("description")) c.description = j["description"].get<std::string>();
  return c;
}

std::vector<Rat> rat_list(const json& j, const std::string& where) {
  std::vector<Rat> out;
  for (std::size_t k = 0; k < as_array(j, where).size(); ++k) out.push_back(rat_from_json(j[k], at(where, k)));
  return out;
}

}  // namespace

BreakSequence sequence_from_json(const json& j, const std::string& where) {
  only_keys(j, {"lower", "upper", "flags", "verdict", "limit_bound", "certificate"}, where);
  BreakSequence s;
  s.upper = rat_list(need(j, "upper", where), at(where, "upper"));
  if (j.contains("lower")) s.lower = rat_list(j["lower"], at(where, "lower"));
  if (!s.lower.empty() && s.lower.size() != s.upper.size()) {
    throw malformed("length-mismatch", "lower and upper differ in length", at(where, "lower"));
  }
  s.flags.assign(s.upper.size(), "");
  if (j.contains("flags")) {
    const json& f = as_array(j["flags"], at(where, "flags"));
    if (f.size() != s.upper.size()) throw malformed("length-mismatch", "flags length", at(where, "flags"));
    for (std::size_t k = 0; k < f.size(); ++k) s.flags[k] = f[k].get<std::string>();
  }
  if (j.contains("certificate")) s.certificate = certificate_from_json(j["certificate"], at(where, "certificate"));
  // the verdict is recomputed from the certificate, never trusted
  s.verdict = verdict(s);
  if (s.verdict == Verdict::non_apf) s.limit_bound = s.certificate.limit;
  return s;
}

json to_json(const BreakSequence& s) {
  json lower = json::array();
  json upper = json::array();
  for (const auto& r : s.lower) lower.push_back(r.str());
  for (const auto& r : s.upper) upper.push_back(r.str());
  json out{{"lower", lower}, {"upper", upper}, {"flags", s.flags}, {"verdict", to_string(s.verdict)}};
  out["limit_bound"] = s.limit_bound ? json(s.limit_bound->str()) : json(nullptr);
  out["certificate"] = to_json(s.certificate);
  return out;
}

FamilyBound family_from_json(const json& j) {
  FamilyBound f;
  if (j.is_array()) {
    f.values = rat_list(j, "values");
    return f;
  }
  only_keys(j, {"values", "slope", "offset"}, "");
  f.values = rat_list(need(j, "values", ""), "values");
  if (j.contains("slope")) f.slope = rat_from_json(j["slope"], "slope");
  if (j.contains("offset")) f.offset = rat_from_json(j["offset"], "offset");
  return f;
}

void write_break_table(std::ostream& out, const BreakSequence& s) {
  out << "n,lower_break,upper_break,flag\n";
  for (std::size_t k = 0; k < s.upper.size(); ++k) {
    out << (k + 1) << ',' << (k < s.lower.size() ? s.lower[k].str() : "") << ',' << s.upper[k].str() << ','
        << (k < s.flags.size() ? s.flags[k] : "") << '\n';
  }
  json v{{"verdict", to_string(s.verdict)}};
  v["limit_bound"] = s.limit_bound ? json(s.limit_bound->str()) : json(nullptr);
  v["certificate"] = s.certificate.description;
  out << v.dump() << '\n';
}

json error_json(const Error& e) {
  json out{{"code", static_cast<int>(e.code())}, {"reason", e.reason()}, {"location", e.location()},
           {"message", e.what()}};
  if (const auto* inc = dynamic_cast<const InconsistentPresentation*>(&e)) {
    const auto& w = inc->witness();
    out["witness"] = {{"x", w.x.exps}, {"y", w.y.exps}, {"z", w.z.exps}, {"left", w.left.exps}, {"right", w.right.exps}};
  }
  return out;
}

}  // namespace ramify::io
