#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rebuttal {

/// Entry point of the `rebuttal` tool. Returns the process exit code: 0 on
/// success, 2 for usage errors, 1 for runtime failures (with
/// {"error": {"kind", "message", "stage"}} written to `err`).
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rebuttal
