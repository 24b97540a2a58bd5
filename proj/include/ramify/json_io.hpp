#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ramify/filtration.hpp"
#include "ramify/planner.hpp"

namespace ramify::io {

using nlohmann::json;

// Parse failures throw Error(malformed_input) with a JSON-pointer-ish location.
json parse_json(const std::string& text, const std::string& source);
json read_json_file(const std::string& path);

Rat rat_from_json(const json& j, const std::string& where);
json to_json(const Rat& r);

PLFunc plfunc_from_json(const json& j, const std::string& where = "");
json to_json(const PLFunc& f);

PcPresentation presentation_from_json(const json& j);
json to_json(const PcPresentation& pres);

GroupElement element_from_json(const json& j, int n, const std::string& where);
json to_json(const GroupElement& x);

IgAssignment ig_from_json(const json& j, int n);

TowerPlan plan_from_json(const json& j);

BreakSequence sequence_from_json(const json& j, const std::string& where = "");
json to_json(const BreakSequence& s);
json to_json(const Certificate& c);

FamilyBound family_from_json(const json& j);

// n,lower_break,upper_break,flag rows, then one verdict object line.
void write_break_table(std::ostream& out, const BreakSequence& s);

json error_json(const Error& e);

}  // namespace ramify::io
