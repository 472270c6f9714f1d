#pragma once

#include <ostream>

namespace credal {

/// Entry point of the `credal` tool. Subcommands: infer, gen-subsetsum, gen-random.
/// Exit codes: 0 success, 2 invalid input or zero-probability evidence, 3 resource guard,
/// 1 anything else.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace credal
