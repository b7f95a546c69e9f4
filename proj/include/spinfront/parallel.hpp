#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#include <omp.h>

namespace spinfront {

// How a sweep is executed. workers == 1 is the serial reference path: a plain
// loop with no OpenMP region, kept so tests can compare the parallel kernels
// against it.
struct ExecPolicy {
  int workers = 1;

  static ExecPolicy serial() { return {1}; }
  static ExecPolicy parallel(int workers) { return {workers < 1 ? 1 : workers}; }
  bool is_serial() const { return workers <= 1; }
};

// Runs body(i) for i in [0, n). Each index must write only to its own output
// slot, so results are independent of scheduling. An exception thrown
// by any iteration is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, const ExecPolicy& policy, Body&& body) {
  if (policy.is_serial() || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(policy.workers)
  for (long long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace spinfront
