#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ramify::cli {

// args excludes the program name. Output goes to `out` unless --out is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ramify::cli
