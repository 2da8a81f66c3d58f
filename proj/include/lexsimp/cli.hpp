#pragma once

#include <iosfwd>

namespace lexsimp::cli {

/// Exit codes: 0 success, 1 runtime failure (JSON error on `err`),
/// 2 usage error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace lexsimp::cli
