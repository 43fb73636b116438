#pragma once

// Deterministic data-parallel map: results come back in index order no matter
// how the work was split across threads.

#include <algorithm>
#include <cstddef>
#include <future>
#include <optional>
#include <thread>
#include <vector>

namespace hkglue {

template <class F>
auto parallel_map(std::size_t n, const F& f) -> std::vector<decltype(f(std::size_t{0}))> {
  using R = decltype(f(std::size_t{0}));
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w * n / workers; k < (w + 1) * n / workers; ++k) slots[k].emplace(f(k));
    }));
  }
  for (auto& j : jobs) j.get();
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace hkglue
