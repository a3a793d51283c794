#pragma once

namespace arfima {

/// Serial is the reference implementation; Parallel runs the same per-item work
/// under OpenMP (thread count from OMP_NUM_THREADS) and must give identical results.
enum class ExecPolicy { Serial, Parallel };

int max_threads();

}  // namespace arfima
