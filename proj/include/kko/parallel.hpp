#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace kko {

// Number of worker threads: KKO_THREADS if set, else the hardware count.
int thread_count();

// Overrides the environment for the rest of the process (0 restores it).
void set_thread_count(int n);

// Runs body(i) for i in [0, n). Work is split into fixed items, so anything
// written per index is independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Pairwise summation in a fixed order.
double tree_sum(const std::vector<double>& v);
std::complex<double> tree_sum(const std::vector<std::complex<double>>& v);

}  // namespace kko
