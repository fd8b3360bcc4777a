#pragma once

#include <cstddef>
#include <functional>

namespace zorich {

/// Worker count used by the parallel loops. Defaults to the ZORICH_THREADS
/// environment variable, else the hardware concurrency.
int thread_count() noexcept;
void set_thread_count(int n) noexcept;

/// Runs body(chunk_begin, chunk_end, chunk_index) over [0, n) split into
/// `chunks` contiguous pieces. The partition depends only on n and chunks,
/// never on the worker count, so per-chunk results merged in chunk order are
/// reproducible.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace zorich
