#pragma once

#include <cstddef>

namespace kickjt {

/// Loop policy for the data-parallel kernels. Serial is the reference path;
/// Parallel must reproduce it bit for bit (items are independent, no cross-item
/// reductions).
enum class Exec { Serial, Parallel };

/// Runs body(i) for i in [0, n). Parallel uses a static OpenMP schedule.
template <class Body>
void for_each_index(Exec exec, std::size_t n, Body&& body) {
  const auto count = static_cast<long long>(n);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  } else {
    for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
  }
}

/// Sets the OpenMP team size used by Exec::Parallel (n <= 0 leaves the default).
void set_thread_count(int n);
int thread_count();

}  // namespace kickjt
