#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sshift {

// Runs the command-line tool on already-split arguments (no program name).
// Returns the process exit code: 0 on success, 1 when the library reports
// a domain error (a JSON {"error", "detail"} line goes to err), 2 on
// usage errors. All regular output goes to out.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sshift
