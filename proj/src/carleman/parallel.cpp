#include "carleman/parallel.hpp"

#include <atomic>
#include <thread>

namespace carleman {

namespace {
int g_threads = static_cast<int>(std::thread::hardware_concurrency());
constexpr int kMaxSlabs = 64;
constexpr std::int64_t kMinSlabSize = 4096;
}  // namespace

void set_threads(int n) { g_threads = n > 0 ? n : 1; }

int threads() { return g_threads > 0 ? g_threads : 1; }

int slab_count(std::int64_t n) {
  if (n <= kMinSlabSize) return 1;
  std::int64_t s = (n + kMinSlabSize - 1) / kMinSlabSize;
  return static_cast<int>(s < kMaxSlabs ? s : kMaxSlabs);
}

void parallel_for_slabs(std::int64_t n,
                        const std::function<void(std::int64_t, std::int64_t, int)>& body) {
  const int slabs = slab_count(n);
  const int nthreads = threads() < slabs ? threads() : slabs;
  if (slabs == 1 || nthreads <= 1) {
    for (int s = 0; s < slabs; ++s) {
      std::int64_t b = n * s / slabs, e = n * (s + 1) / slabs;
      body(b, e, s);
    }
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int s = next.fetch_add(1);
      if (s >= slabs) return;
      std::int64_t b = n * s / slabs, e = n * (s + 1) / slabs;
      body(b, e, s);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads - 1);
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

double slab_sum(std::int64_t n, const std::function<double(std::int64_t)>& term) {
  const int slabs = slab_count(n);
  std::vector<double> partial(slabs, 0.0);
  parallel_for_slabs(n, [&](std::int64_t b, std::int64_t e, int s) {
    double acc = 0.0;
    for (std::int64_t i = b; i < e; ++i) acc += term(i);
    partial[s] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace carleman
