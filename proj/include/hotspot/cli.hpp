#pragma once

namespace hotspot {

// Command-line entry point. Exit codes: 0 success, 1 input/usage error,
// 2 internal error.
int run_cli(int argc, const char* const* argv);

} // namespace hotspot
