#pragma once

namespace credal {

/// Selects between the OpenMP kernels and their serial reference implementations.
/// Both produce identical results; the serial path exists for testing and benchmarks.
enum class Execution { serial, parallel };

/// Number of OpenMP threads available to parallel regions (1 without OpenMP).
int available_threads();
void set_threads(int n);

} // namespace credal
