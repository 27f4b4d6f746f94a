#include "idsforge/parallel.hpp"

#include <omp.h>

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace idsforge {

void set_thread_count(int threads) { omp_set_num_threads(threads > 0 ? threads : 1); }

int thread_count() { return omp_get_max_threads(); }

int default_thread_count() {
  if (const char* env = std::getenv("IDSFORGE_THREADS")) {
    int value = 0;
    const auto* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec == std::errc{} && ptr == end && value > 0) return value;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace idsforge
