#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace mcig {

/// Worker threads used by reductions and parallel loops (default 1).
void set_thread_count(unsigned count);
[[nodiscard]] unsigned thread_count() noexcept;

/// Runs body(i) for i in [0, n), spread over the configured thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

inline constexpr std::size_t kReductionBlock = 512;

/// Sums a sequence of n terms with a reduction tree whose shape depends on n
/// only: contiguous blocks of kReductionBlock terms are accumulated
/// sequentially, then block sums are combined pairwise. The result is
/// bit-identical for every thread count.
///
/// `accumulate(i, acc)` adds term i into acc; `zero` is the additive identity.
template <typename T, typename Accumulate>
T tree_reduce(std::size_t n, const T &zero, Accumulate &&accumulate) {
  if (n == 0)
    return zero;
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<T> partial(blocks, zero);
  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * kReductionBlock;
    const std::size_t end = begin + kReductionBlock < n ? begin + kReductionBlock : n;
    T &acc = partial[b];
    for (std::size_t i = begin; i < end; ++i)
      accumulate(i, acc);
  };
  if (blocks == 1 || thread_count() <= 1) {
    for (std::size_t b = 0; b < blocks; ++b)
      run_block(b);
  } else {
    parallel_for(blocks, run_block);
  }
  for (std::size_t width = 1; width < blocks; width *= 2)
    for (std::size_t i = 0; i + width < blocks; i += 2 * width)
      partial[i] += partial[i + width];
  return partial[0];
}

} // namespace mcig
