#pragma once

#include <ostream>

namespace tecue::cli {

/// Runs one `tecue` invocation. Returns 0 on success, 1 on usage or
/// config errors, 2 on data, numeric or I/O errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tecue::cli
