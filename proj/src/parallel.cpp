#include "spinchain/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace spinchain {

namespace {

int threads_from_env() {
  const char* raw = std::getenv("SPINCHAIN_THREADS");
  if (raw == nullptr) return 0;
  try {
    const int value = std::stoi(raw);
    return value > 0 ? value : 0;
  } catch (...) {
    return 0;
  }
}

std::atomic<int>& cap_storage() {
  static std::atomic<int> cap{threads_from_env()};
  return cap;
}

}  // namespace

int thread_cap() {
  const int cap = cap_storage().load();
  return cap > 0 ? cap : omp_get_max_threads();
}

void set_thread_cap(int threads) {
  cap_storage().store(threads > 0 ? threads : 0);
  if (threads > 0) omp_set_num_threads(threads);
}

void apply_thread_env() {
  const int cap = threads_from_env();
  if (cap > 0) set_thread_cap(cap);
}

}  // namespace spinchain
