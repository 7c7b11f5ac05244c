#include "cardframe/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cardframe {

namespace {

std::atomic<int> g_budget{0};  // 0 = not set yet, fall back to hardware

int default_budget() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

}  // namespace

void set_thread_budget(int n) { g_budget.store(std::max(1, n)); }

int thread_budget() {
  int b = g_budget.load();
  return b == 0 ? default_budget() : b;
}

size_t chunk_count(size_t n, size_t chunk_size) {
  if (n == 0) return 0;
  if (chunk_size == 0) {
    size_t t = size_t(thread_budget());
    chunk_size = std::max<size_t>(1024, (n + t * 4 - 1) / (t * 4));
  }
  return (n + chunk_size - 1) / chunk_size;
}

void for_each_chunk(size_t n, size_t chunk_size,
                    const std::function<void(size_t, size_t, size_t)>& fn) {
  if (n == 0) return;
  if (chunk_size == 0) {
    size_t t = size_t(thread_budget());
    chunk_size = std::max<size_t>(1024, (n + t * 4 - 1) / (t * 4));
  }
  const size_t count = (n + chunk_size - 1) / chunk_size;
  const size_t workers = std::min<size_t>(size_t(thread_budget()), count);

  if (workers <= 1) {
    for (size_t c = 0; c < count; ++c)
      fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
    return;
  }

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto body = [&] {
    for (;;) {
      size_t c = next.fetch_add(1);
      if (c >= count || failed.load()) return;
      try {
        fn(c, c * chunk_size, std::min(n, (c + 1) * chunk_size));
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (size_t i = 1; i < workers; ++i) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace cardframe
