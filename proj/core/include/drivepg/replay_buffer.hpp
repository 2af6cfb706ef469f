#pragma once

#include <cstddef>
#include <vector>

#include "drivepg/random.hpp"
#include "drivepg/types.hpp"

namespace drivepg::ddpg {

/// Fixed-capacity FIFO of transitions with uniform, with-replacement sampling.
class ReplayBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 100000;

  explicit ReplayBuffer(std::size_t capacity = kDefaultCapacity, Rng rng = Rng{});

  /// Appends; once full, overwrites the oldest transition.
  void push(const Experience& exp);

  /// Throws UsageError when fewer than `batch_size` transitions are stored.
  std::vector<Experience> sample(std::size_t batch_size);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }

  /// i-th stored transition, oldest first.
  const Experience& at(std::size_t i) const;

  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  /// Contents oldest first; used for checkpointing.
  std::vector<Experience> contents() const;
  /// Rebuilds a buffer from `contents()` output.
  static ReplayBuffer restore(std::size_t capacity, const std::vector<Experience>& contents, Rng rng);

 private:
  std::size_t capacity_;
  std::vector<Experience> storage_;
  std::size_t head_ = 0;  // slot the next push writes
  std::size_t size_ = 0;
  Rng rng_;
};

}  // namespace drivepg::ddpg
