#pragma once

#include <atomic>
#include <thread>

namespace ibrep {

template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, Fn fn)
    -> std::vector<decltype(fn(items[0]))> {
  using Out = decltype(fn(items[0]));
  std::vector<Out> results(items.size());
  if (items.empty()) return results;

  const int threads = std::min<int>(worker_count(), int(items.size()));
  if (threads <= 1) {
    for (size_t i = 0; i < items.size(); ++i) results[i] = fn(items[i]);
    return results;
  }

  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1))
        results[i] = fn(items[i]);
    });
  }
  for (std::thread& th : pool) th.join();
  return results;
}

}  // namespace ibrep
