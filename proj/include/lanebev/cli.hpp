#pragma once

#include <iosfwd>

namespace lanebev {

/// Runs one CLI invocation. Returns 0 on success, 1 on domain errors (a
/// single-line JSON object is written to `err`) and 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lanebev
