#pragma once

#include <algorithm>
#include <atomic>
#include <future>
#include <thread>

namespace cbp {

template <typename T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn,
                            unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) slots[i].emplace(fn(i));
    }));
  }
  for (auto& w : workers) w.get();
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace cbp
