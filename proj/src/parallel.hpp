#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace pel::detail {

/// Splits [0, total) into `workers` contiguous blocks and runs
/// fn(worker, begin, end) for each, one thread per block. The split depends
/// only on (total, workers), so results merged in worker order are reproducible.
template <typename Fn>
void for_each_block(std::size_t total, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(total, 1)));
  auto bounds = [&](std::size_t w) { return total * w / workers; };
  if (workers == 1) {
    fn(std::size_t{0}, std::size_t{0}, total);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        fn(w, bounds(w), bounds(w + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pel::detail
