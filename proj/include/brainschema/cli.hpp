#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brainschema {

/// Runs one command line (without the program name).
/// Exit codes: 0 success, 1 usage error, 2 runtime failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brainschema
