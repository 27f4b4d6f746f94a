#pragma once

namespace idsforge {

// Thread budget for the OpenMP kernels. Results never depend on it.
void set_thread_count(int threads);
int thread_count();

// IDSFORGE_THREADS if set to a positive integer, otherwise hardware concurrency.
int default_thread_count();

class ScopedThreadCount {
 public:
  explicit ScopedThreadCount(int threads) : saved_(thread_count()) { set_thread_count(threads); }
  ~ScopedThreadCount() { set_thread_count(saved_); }
  ScopedThreadCount(const ScopedThreadCount&) = delete;
  ScopedThreadCount& operator=(const ScopedThreadCount&) = delete;

 private:
  int saved_;
};

}  // namespace idsforge
