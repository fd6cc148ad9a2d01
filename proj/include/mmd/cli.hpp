#pragma once

#include <ostream>

namespace mmd {

/// Entry point of the `mmd` tool. Exit codes: 0 success, 1 usage or validation error, 2 I/O error.
/// MMD_THREADS caps OpenMP parallelism.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmd
