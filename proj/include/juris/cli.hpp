#pragma once

namespace juris::cli {

// Entry point behind the `juris` binary. Exit codes: 0 success, 2 usage
// error, 3 runtime error.
int dispatch(int argc, const char* const* argv);

}  // namespace juris::cli
