#pragma once

#include <algorithm>
#include <exception>
#include <future>
#include <thread>
#include <vector>

namespace whitham {

// Runs fn(k) for k in [0, n) on up to hardware_concurrency threads. Each
// index is handled by exactly one task, so results written per index do not
// depend on scheduling. The exception of the lowest failing index is rethrown.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::future<void>> tasks;
  for (int w = 0; w < workers; ++w)
    tasks.push_back(std::async(std::launch::async, [&fn, &errors, w, workers, n] {
      for (int k = w; k < n; k += workers) {
        try {
          fn(k);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    }));
  for (auto& t : tasks) t.get();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace whitham
