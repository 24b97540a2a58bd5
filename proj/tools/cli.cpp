#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ramify/json_io.hpp"

namespace ramify::cli {

namespace {

using io::json;

Rat rat_arg(const std::string& s, const std::string& flag) {
  try {
    return Rat::parse(s);
  } catch (const Error& e) {
    throw malformed("bad-rational", e.what(), flag);
  }
}

mpz_class int_arg(const std::string& s, const std::string& flag) {
  const Rat r = rat_arg(s, flag);
  if (!r.is_integer()) throw malformed("expected-integer", "expected an integer", flag);
  return r.num();
}

std::vector<int> int_list(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw malformed("bad-list", "expected comma-separated integers", flag);
    }
  }
  return out;
}

GroupElement element_arg(const PcGroup& g, const std::string& s, const std::string& flag) {
  const auto e = int_list(s, flag);
  if (static_cast<int>(e.size()) != g.n()) {
    throw malformed("bad-element", "element needs " + std::to_string(g.n()) + " exponents", flag);
  }
  GroupElement x(e);
  g.check_element(x, flag);
  return x;
}

std::vector<GroupElement> elements_arg(const PcGroup& g, const std::vector<std::string>& v,
                                       const std::string& flag) {
  std::vector<GroupElement> out;
  for (const auto& s : v) out.push_back(element_arg(g, s, flag));
  return out;
}

json orders(const std::vector<Subgroup>& series) {
  json out = json::array();
  for (const auto& s : series) out.push_back(s.order());
  return out;
}

json subgroup_json(const PcGroup& g, const Subgroup& h, bool with_elements) {
  json out{{"order", h.order()}};
  if (with_elements) {
    json els = json::array();
    for (const auto& x : h.elements(g)) els.push_back(x.exps);
    out["elements"] = els;
  }
  return out;
}

json witness_json(const AssociativityWitness& w) {
  return {{"x", w.x.exps}, {"y", w.y.exps}, {"z", w.z.exps}, {"left", w.left.exps}, {"right", w.right.exps}};
}

std::shared_ptr<const PcGroup> load_group(const std::string& path) {
  return std::make_shared<const PcGroup>(io::presentation_from_json(io::read_json_file(path)));
}

json rat_array(const std::vector<Rat>& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(r.str());
  return out;
}

json closed_form_json(const ClosedFormReport& r) {
  json out{{"pass", r.pass},
           {"closed_form", rat_array(r.closed_form)},
           {"v", rat_array(r.v)},
           {"dv", rat_array(r.dv)},
           {"cauchy_constant", r.cauchy_constant.str()},
           {"cauchy", r.cauchy}};
  out["failed_n"] = r.failed_n ? json(*r.failed_n) : json(nullptr);
  return out;
}

struct PlanOutcome {
  std::string text;
  std::optional<Error> error;
};

PlanOutcome evaluate_plan(const std::string& path, bool csv) {
  PlanOutcome o;
  try {
    const TowerPlan plan = io::plan_from_json(io::read_json_file(path));
    std::ostringstream ss;
    if (plan.kind == PlanKind::apf) {
      const ApfResult res = apf_plan(plan);
      if (csv) {
        io::write_break_table(ss, res.sequence);
      } else {
        json j{{"kind", to_string(plan.kind)},
               {"sequence", io::to_json(res.sequence)},
               {"closed_form", closed_form_json(closed_form_check(res, plan))}};
        ss << j.dump() << '\n';
      }
    } else {
      const BreakSequence seq = nonapf_plan(plan);
      if (csv) {
        io::write_break_table(ss, seq);
      } else {
        ss << json{{"kind", to_string(plan.kind)}, {"sequence", io::to_json(seq)}}.dump() << '\n';
      }
    }
    o.text = ss.str();
  } catch (const Error& e) {
    o.error = e;
  } catch (const std::exception& e) {
    o.error = malformed("bad-input", e.what(), path);
  }
  return o;
}

BreakSequence load_sequence(const std::string& path) {
  const json j = io::read_json_file(path);
  if (j.is_object() && j.contains("sequence")) return io::sequence_from_json(j["sequence"], "sequence");
  return io::sequence_from_json(j);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact ramification and p-group calculus", "ramify"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  app.add_option("--out", out_path, "write results to this file instead of stdout");

  // one handler per leaf command; it returns the JSON/CSV text to emit
  std::function<std::string()> handler;
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    CLI::App* c = parent->add_subcommand(name, help);
    return c;
  };

  // herbrand -------------------------------------------------------------
  CLI::App* herbrand = app.add_subcommand("herbrand", "Herbrand function calculus");
  herbrand->require_subcommand(1);
  long h_break = 0, h_p = 0;
  std::string h_eval, h_file, h_outer, h_inner, h_x, h_breaks;
  bool h_phi = false;

  CLI::App* h_step = leaf(herbrand, "step", "psi of a degree-p step with lower break i");
  h_step->add_option("--break", h_break)->required();
  h_step->add_option("--p", h_p)->required();
  h_step->add_option("--eval", h_eval);
  h_step->callback([&] {
    handler = [&] {
      const PLFunc f = psi_step(h_break, h_p);
      if (!h_eval.empty()) return json{{"value", f(rat_arg(h_eval, "--eval")).str()}}.dump();
      return io::to_json(f).dump();
    };
  });

  CLI::App* h_compose = leaf(herbrand, "compose", "outer o inner");
  h_compose->add_option("--outer", h_outer)->required();
  h_compose->add_option("--inner", h_inner)->required();
  h_compose->add_option("--eval", h_eval);
  h_compose->callback([&] {
    handler = [&] {
      const PLFunc f = compose(io::plfunc_from_json(io::read_json_file(h_outer), "outer"),
                               io::plfunc_from_json(io::read_json_file(h_inner), "inner"));
      if (!h_eval.empty()) return json{{"value", f(rat_arg(h_eval, "--eval")).str()}}.dump();
      return io::to_json(f).dump();
    };
  });

  CLI::App* h_invert = leaf(herbrand, "invert", "inverse function");
  h_invert->add_option("--file", h_file)->required();
  h_invert->add_option("--eval", h_eval);
  h_invert->callback([&] {
    handler = [&] {
      const PLFunc f = invert(io::plfunc_from_json(io::read_json_file(h_file)));
      if (!h_eval.empty()) return json{{"value", f(rat_arg(h_eval, "--eval")).str()}}.dump();
      return io::to_json(f).dump();
    };
  });

  CLI::App* h_evalc = leaf(herbrand, "eval", "evaluate at a point");
  h_evalc->add_option("--file", h_file)->required();
  h_evalc->add_option("--x", h_x)->required();
  h_evalc->callback([&] {
    handler = [&] {
      const PLFunc f = io::plfunc_from_json(io::read_json_file(h_file));
      return json{{"value", f(rat_arg(h_x, "--x")).str()}}.dump();
    };
  });

  CLI::App* h_tower = leaf(herbrand, "tower", "psi of a tower of degree-p steps");
  h_tower->add_option("--breaks", h_breaks, "relative lower breaks, comma separated")->required();
  h_tower->add_option("--p", h_p)->required();
  h_tower->add_option("--eval", h_eval);
  h_tower->add_flag("--phi", h_phi, "report phi = psi^-1 instead of psi");
  h_tower->callback([&] {
    handler = [&] {
      const auto b = int_list(h_breaks, "--breaks");
      const std::vector<long> breaks(b.begin(), b.end());
      const TowerPsi t = tower_psi(breaks, h_p);
      const PLFunc f = h_phi ? invert(t.psi) : t.psi;
      json j{{"function", io::to_json(f)}, {"upper", rat_array(t.upper)}};
      if (!h_eval.empty()) j["value"] = f(rat_arg(h_eval, "--eval")).str();
      return j.dump();
    };
  });

  // group ----------------------------------------------------------------
  CLI::App* group = app.add_subcommand("group", "power-commutator groups");
  group->require_subcommand(1);
  std::string g_file, g_table, g_element;
  std::vector<std::string> g_gens;
  bool g_series = false, g_normal = false, g_elements = false;
  int g_k = 0, g_heis = 0, g_ctower = 0, g_depth = 0;
  std::string g_tower;

  CLI::App* g_check = leaf(group, "check", "consistency check");
  g_check->add_option("--file", g_file)->required();
  g_check->add_flag("--series", g_series, "also report the central and p-series");
  g_check->callback([&] {
    handler = [&] {
      const PcPresentation pres = io::presentation_from_json(io::read_json_file(g_file));
      const ConsistencyReport rep = consistency_check(pres);
      if (!rep.consistent) throw InconsistentPresentation(*rep.witness);
      json j{{"consistent", true}, {"method", rep.method}};
      const PcGroup g(pres);
      if (g_series) {
        const SeriesReport s = series_equality_check(g);
        j["order"] = g.order();
        j["gamma_orders"] = s.gamma_orders;
        j["p_series_orders"] = s.p_series_orders;
        j["level_equal"] = s.level_equal;
        j["gamma_equals_p_series"] = s.all_equal;
        j["power_in_derived"] = s.power_in_derived;
      }
      return j.dump();
    };
  });

  CLI::App* g_closure = leaf(group, "closure", "subgroup generated by elements");
  g_closure->add_option("--file", g_file)->required();
  g_closure->add_option("--gen", g_gens, "exponent vector, comma separated (repeatable)");
  g_closure->add_flag("--normal", g_normal, "normal closure");
  g_closure->add_flag("--elements", g_elements, "list the elements");
  g_closure->callback([&] {
    handler = [&] {
      auto g = load_group(g_file);
      const auto gens = elements_arg(*g, g_gens, "--gen");
      const Subgroup h = subgroup_closure(*g, gens, g_normal);
      json j = subgroup_json(*g, h, g_elements);
      j["min_generators"] = min_generators(*g, h);
      j["normal"] = is_normal(*g, h);
      return j.dump();
    };
  });

  CLI::App* g_seriesc = leaf(group, "series", "lower central and lower p-series");
  g_seriesc->add_option("--file", g_file)->required();
  g_seriesc->add_option("--length", g_element, "also report the length of this element");
  g_seriesc->callback([&] {
    handler = [&] {
      auto g = load_group(g_file);
      const SeriesReport s = series_equality_check(*g);
      json j{{"order", g->order()},
             {"gamma_orders", s.gamma_orders},
             {"p_series_orders", s.p_series_orders},
             {"level_equal", s.level_equal},
             {"gamma_equals_p_series", s.all_equal},
             {"power_in_derived", s.power_in_derived},
             {"min_generators", min_generators(*g, whole_group(*g))}};
      if (!g_element.empty()) {
        const ElementLength len = element_length(*g, element_arg(*g, g_element, "--length"));
        j["length"] = len.exceeds_class ? json("central-depth-exceeded") : json(len.length);
      }
      return j.dump();
    };
  });

  CLI::App* g_rank = leaf(group, "rank", "rank growth probe");
  g_rank->add_option("--file", g_file)->required();
  g_rank->add_option("--k", g_k)->required();
  g_rank->callback([&] {
    handler = [&] {
      auto g = load_group(g_file);
      return json{{"k", g_k}, {"count", rank_growth_probe(*g, g_k)}}.dump();
    };
  });

  CLI::App* g_probe = leaf(group, "probe", "normal closures along a C-tower");
  g_probe->add_option("--file", g_file)->required();
  g_probe->add_option("--tower", g_tower, "1-based generator indices, comma separated");
  g_probe->callback([&] {
    handler = [&] {
      auto g = load_group(g_file);
      std::vector<int> tower;
      if (g_tower.empty()) {
        for (int k = 1; k <= g->n(); ++k) tower.push_back(k);
      } else {
        tower = int_list(g_tower, "--tower");
      }
      const ProbeReport r = just_infinite_probe(*g, tower);
      json rows = json::array();
      for (const auto& row : r.rows) {
        rows.push_back({{"generator", row.tower_position},
                        {"closure_order", row.closure_order},
                        {"missing", row.missing},
                        {"exempt", row.exempt ? json(*row.exempt) : json(nullptr)}});
      }
      return json{{"pass", r.pass}, {"rows", rows}}.dump();
    };
  });

  CLI::App* g_build = leaf(group, "build", "emit a shipped presentation");
  auto* opt_h = g_build->add_option("--heisenberg", g_heis, "order p^3 group for this p");
  auto* opt_c = g_build->add_option("--c-tower", g_ctower, "C-tower truncation for this p");
  opt_h->excludes(opt_c);
  g_build->add_option("--depth", g_depth);
  g_build->add_option("--table", g_table, "relation table presentation JSON (table policy)");
  g_build->callback([&] {
    handler = [&]() -> std::string {
      if (g_heis) return io::to_json(build_heisenberg(g_heis)).dump();
      if (!g_ctower) throw malformed("missing-option", "give --heisenberg or --c-tower", "group build");
      RelationTable table;
      FillPolicy policy = FillPolicy::trivial_fill;
      if (!g_table.empty()) {
        policy = FillPolicy::table;
        const PcPresentation t = io::presentation_from_json(io::read_json_file(g_table));
        if (t.p() != g_ctower || t.n() != g_depth) {
          throw malformed("table-shape", "table p and n must match --c-tower and --depth", "--table");
        }
        for (int j = 0; j < t.n(); ++j) {
          if (!t.power_rhs(j).is_identity()) table.powers.push_back({j, t.power_rhs(j)});
          for (int i = 0; i < j; ++i) {
            if (!t.comm_rhs(j, i).is_identity()) table.comms.push_back({j, i, t.comm_rhs(j, i)});
          }
        }
      }
      const PcPresentation pres = c_tower_presentation(g_ctower, g_depth, policy, table);
      const ConsistencyReport rep = consistency_check(pres);
      if (!rep.consistent) throw InconsistentPresentation(*rep.witness);
      return io::to_json(pres).dump();
    };
  });

  // filtration -----------------------------------------------------------
  CLI::App* filt = app.add_subcommand("filtration", "ramification filtrations on PC groups");
  filt->require_subcommand(1);
  std::string f_group, f_ig, f_u;
  std::vector<std::string> f_h;
  bool f_elements = false;
  auto filt_inputs = [&](CLI::App* c) {
    c->add_option("--group", f_group, "presentation JSON")->required();
    c->add_option("--ig", f_ig, "i_G assignment JSON")->required();
  };
  auto load_filtration = [&] {
    auto g = load_group(f_group);
    return RamFiltration(g, io::ig_from_json(io::read_json_file(f_ig), g->n()));
  };

  CLI::App* f_validate = leaf(filt, "validate", "check that every level set is a normal subgroup");
  filt_inputs(f_validate);
  f_validate->callback([&] {
    handler = [&] {
      auto g = load_group(f_group);
      const FiltrationValidation v = validate(*g, io::ig_from_json(io::read_json_file(f_ig), g->n()));
      json j{{"ok", v.ok}};
      if (!v.ok) {
        j["level"] = v.level;
        j["kind"] = v.kind;
        j["x"] = v.x.exps;
        j["y"] = v.y.exps;
      }
      return j.dump();
    };
  });

  CLI::App* f_herbrand = leaf(filt, "herbrand", "phi and psi of the filtration");
  filt_inputs(f_herbrand);
  f_herbrand->callback([&] {
    handler = [&] {
      const RamFiltration rf = load_filtration();
      const PLFunc phi = herbrand_of(rf);
      return json{{"lower_breaks", rf.lower_breaks()},
                  {"upper_breaks", rat_array(upper_breaks(rf))},
                  {"phi", io::to_json(phi)},
                  {"psi", io::to_json(invert(phi))}}
          .dump();
    };
  });

  CLI::App* f_upper = leaf(filt, "upper", "upper numbering subgroup G^u");
  filt_inputs(f_upper);
  f_upper->add_option("--u", f_u)->required();
  f_upper->add_flag("--elements", f_elements);
  f_upper->callback([&] {
    handler = [&] {
      const RamFiltration rf = load_filtration();
      const Rat u = rat_arg(f_u, "--u");
      json j = subgroup_json(rf.group(), upper_level(rf, u), f_elements);
      j["u"] = u.str();
      return j.dump();
    };
  });

  CLI::App* f_quot = leaf(filt, "quotient", "filtration induced on G/H");
  filt_inputs(f_quot);
  f_quot->add_option("--h-gen", f_h, "generator of H, comma separated exponents (repeatable)");
  f_quot->callback([&] {
    handler = [&] {
      const RamFiltration rf = load_filtration();
      const Subgroup h = subgroup_closure(rf.group(), elements_arg(rf.group(), f_h, "--h-gen"), false);
      const QuotientFiltration q = quotient_filtration(rf, h);
      const PcGroup& qg = q.map->quotient();
      const IgAssignment a = q.filtration.assignment();
      json ig = json::array();
      for (const auto& e : a.entries) ig.push_back({{"element", e.element.exps}, {"value", e.value}});
      json kept = json::array();
      for (int k : q.map->kept()) kept.push_back(k + 1);
      return json{{"quotient", io::to_json(qg.presentation())},
                  {"kept_generators", kept},
                  {"ig", {{"ig", ig}, {"default", a.default_value}}},
                  {"lower_breaks", q.filtration.lower_breaks()},
                  {"upper_breaks", rat_array(upper_breaks(q.filtration))}}
          .dump();
    };
  });

  // plan -----------------------------------------------------------------
  CLI::App* plan = app.add_subcommand("plan", "tower planning");
  plan->require_subcommand(1);
  std::vector<std::string> p_files;
  std::string p_format = "csv";
  unsigned p_jobs = 1;
  long q_i = 0, q_j = 0, q_s = 0, q_p = 0, q_e = 0;
  std::string a_j, a_e;
  bool a_literal = false;

  CLI::App* p_run = leaf(plan, "run", "evaluate plan files");
  p_run->add_option("--file", p_files, "plan JSON (repeatable)")->required();
  p_run->add_option("--format", p_format)->check(CLI::IsMember({"csv", "json"}));
  p_run->add_option("--jobs", p_jobs, "parallel plan evaluations")->check(CLI::Range(1u, 256u));
  p_run->callback([&] {
    handler = [&] {
      const bool csv = p_format == "csv";
      std::vector<PlanOutcome> results(p_files.size());
      const unsigned workers = std::min<unsigned>(p_jobs, static_cast<unsigned>(p_files.size()));
      if (workers <= 1) {
        for (std::size_t k = 0; k < p_files.size(); ++k) results[k] = evaluate_plan(p_files[k], csv);
      } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
          pool.emplace_back([&, w] {
            for (std::size_t k = w; k < p_files.size(); k += workers) results[k] = evaluate_plan(p_files[k], csv);
          });
        }
        for (auto& t : pool) t.join();
      }
      std::string text;
      for (const auto& r : results) {
        if (r.error) throw *r.error;
        text += r.text;
      }
      text.pop_back();  // the caller appends the final newline
      return text;
    };
  });

  CLI::App* p_feas = leaf(plan, "feasible", "second cyclic step feasibility");
  p_feas->add_option("--i", q_i)->required();
  p_feas->add_option("--j", q_j)->required();
  p_feas->add_option("--s", q_s)->required();
  p_feas->add_option("--p", q_p)->required();
  p_feas->add_option("--e", q_e)->required();
  p_feas->callback([&] {
    handler = [&] {
      const Feasibility f = second_step_feasible({q_i, q_j, q_s, q_p, q_e});
      json j{{"feasible", f.feasible}};
      if (!f.feasible) j["reason"] = f.reason;
      return j.dump();
    };
  });

  CLI::App* p_adm = leaf(plan, "admissible", "cyclic break admissibility");
  p_adm->add_option("--j", a_j)->required();
  p_adm->add_option("--p", q_p)->required();
  p_adm->add_option("--e", a_e)->required();
  p_adm->add_flag("--literal", a_literal, "bound only, no divisibility rule");
  p_adm->callback([&] {
    handler = [&] {
      const bool ok = cyclic_break_admissible(int_arg(a_j, "--j"), q_p, int_arg(a_e, "--e"), !a_literal);
      return json{{"admissible", ok}}.dump();
    };
  });

  // merge ----------------------------------------------------------------
  CLI::App* merge = app.add_subcommand("merge", "break sequence merges");
  merge->require_subcommand(1);
  std::vector<std::string> m_files;
  std::string m_base, m_family;
  long m_e0 = 0;

  CLI::App* m_max = leaf(merge, "max", "index-wise maximum (compositum)");
  m_max->add_option("--file", m_files, "break sequence JSON (repeatable)")->required();
  m_max->callback([&] {
    handler = [&] {
      std::vector<BreakSequence> seqs;
      for (const auto& f : m_files) seqs.push_back(load_sequence(f));
      const MergeResult r = compositum_merge(seqs);
      return json{{"sequence", io::to_json(r.merged)}, {"collisions", r.collisions}}.dump();
    };
  });

  CLI::App* m_repair = leaf(merge, "repair", "merge with a family of lower bounds");
  m_repair->add_option("--base", m_base)->required();
  auto* fam = m_repair->add_option("--family", m_family, "family bound JSON");
  auto* cor = m_repair->add_option("--family-e0", m_e0, "use the ceil(k/2) e0 family");
  fam->excludes(cor);
  m_repair->callback([&] {
    handler = [&] {
      const BreakSequence base = load_sequence(m_base);
      FamilyBound f;
      if (!m_family.empty()) {
        f = io::family_from_json(io::read_json_file(m_family));
      } else if (m_e0 > 0) {
        f = tower_family_bound(m_e0, static_cast<int>(base.horizon()));
      } else {
        throw malformed("missing-option", "give --family or --family-e0", "merge repair");
      }
      return json{{"sequence", io::to_json(repair_merge(base, f))}}.dump();
    };
  });

  // ----------------------------------------------------------------------
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    const Error m = malformed("bad-arguments", e.what(), "argv");
    err << io::error_json(m).dump() << '\n';
    return 1;
  }

  try {
    const std::string text = handler() + "\n";
    if (out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw malformed("unwritable-file", "cannot write " + out_path, "--out");
      f << text;
    }
    return 0;
  } catch (const Error& e) {
    err << io::error_json(e).dump() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::domain_error& e) {
    err << io::error_json(malformed("domain-error", e.what(), "")).dump() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << io::error_json(malformed("bad-json", e.what(), "")).dump() << '\n';
    return 1;
  }
}

}  // namespace ramify::cli
