#include "smoothmc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace smoothmc {

int default_thread_count() {
  if (const char* env = std::getenv("SMOOTHMC_THREADS")) {
    std::size_t pos = 0;
    int value = 0;
    try {
      value = std::stoi(env, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("SMOOTHMC_THREADS is not an integer: " + std::string(env));
    }
    if (pos != std::string(env).size() || value < 1) {
      throw std::invalid_argument("SMOOTHMC_THREADS must be a positive integer, got " +
                                  std::string(env));
    }
    return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  if (threads < 1) throw std::invalid_argument("parallel_for: threads must be >= 1");

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::size_t first_error_index = count;

  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        // Keep the failure from the smallest index so reruns report the same
        // error regardless of scheduling.
        if (i < first_error_index) {
          first_error_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();

  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace smoothmc
