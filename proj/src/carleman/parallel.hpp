#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace carleman {

// Worker count used by parallel_for_slabs / slab_sum. The slab decomposition is
// fixed by the problem size, so results are bit-identical for any thread count.
void set_threads(int n);
int threads();

// Partitions [0, n) into a fixed number of contiguous slabs and runs
// body(begin, end, slab_index) for each. Slabs may run on any thread.
void parallel_for_slabs(std::int64_t n,
                        const std::function<void(std::int64_t, std::int64_t, int)>& body);

int slab_count(std::int64_t n);

// Sum of term(i) over [0, n): per-slab partials accumulated left to right,
// then slabs combined in index order.
double slab_sum(std::int64_t n, const std::function<double(std::int64_t)>& term);

}  // namespace carleman
