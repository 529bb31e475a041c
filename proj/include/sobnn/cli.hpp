#pragma once

namespace sobnn {

/// Command-line entry point: generate | train | sweep | gradcheck.
/// Returns 0 on success, 1 on run failure, 2 on usage errors.
int run_cli(int argc, const char* const* argv);

}  // namespace sobnn
