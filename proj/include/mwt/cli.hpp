#pragma once

// Command-line front end. Subcommands: constants, maximal, sparse,
// verify-theorem, search-extremal, reduce-linear. Each writes
// <out-dir>/<subcommand>.json (manifest + report) and, when a checked
// inequality fails, <out-dir>/certificate.json.
//
// Exit status: 0 all checks passed, 1 verification failure, 2 bad input,
// validation or domain error, budget refusal or unwritable output.

#include <ostream>
#include <string>
#include <vector>

namespace mwt {

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mwt
