#pragma once

namespace milkspec {

/// Selects the serial reference path or the OpenMP path of a kernel. Both
/// paths produce bit-identical results; the serial one is kept for testing
/// and benchmarking.
enum class Exec { serial, parallel };

}  // namespace milkspec
