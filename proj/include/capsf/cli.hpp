#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace capsf {

/// Command-line entry point (prepare / train / eval / predict / sweep /
/// synth). args excludes the program name. Exit codes: 0 success, 1 I/O
/// error, 2 invalid config or schema failure, 3 corrupt checkpoint.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace capsf
