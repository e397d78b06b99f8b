#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsg {

/// Entry point behind the `tsg` binary. `args` excludes the program name.
/// Reports go to `out`, the one-line summary and diagnostics to `err`.
/// Exit codes: 0 verified/dominated, 1 violation found, 2 input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace tsg
