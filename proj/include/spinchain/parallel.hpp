#pragma once

namespace spinchain {

/// Selects the code path of the data-parallel kernels. `serial` is the
/// plain reference loop; `parallel` is the OpenMP version. Both produce
/// bit-identical results: every parallel loop writes per-index outputs or
/// reduces with max/min, never with floating-point sums.
enum class Exec { serial, parallel };

/// Upper bound on OpenMP threads for the parallel kernels. Reads
/// SPINCHAIN_THREADS on first use; `set_thread_cap` overrides it.
int thread_cap();
void set_thread_cap(int threads);

/// Applies SPINCHAIN_THREADS (if set and positive) to the OpenMP runtime.
void apply_thread_env();

}  // namespace spinchain
