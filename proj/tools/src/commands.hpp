#pragma once
#include <string>
#include <vector>

namespace tippingscope::cli {

/// Parses the command line and runs the selected subcommand.  Exit codes:
/// 0 success (including --help), 1 I/O failure, 2 numerical/domain failure,
/// 64 usage error, 70 unexpected internal error.
int dispatch(int argc, const char* const* argv);

/// In-process convenience (used by the test suite): `args` excludes the
/// program name.
int dispatch(const std::vector<std::string>& args);

} // namespace tippingscope::cli
