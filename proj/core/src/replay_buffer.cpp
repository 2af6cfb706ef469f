#include "drivepg/replay_buffer.hpp"

#include <string>

#include "drivepg/errors.hpp"

namespace drivepg::ddpg {

ReplayBuffer::ReplayBuffer(std::size_t capacity, Rng rng) : capacity_(capacity), rng_(rng) {
  if (capacity == 0) throw ConfigurationError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Experience& exp) {
  if (storage_.size() < capacity_) {
    storage_.push_back(exp);
  } else {
    storage_[head_] = exp;
  }
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

const Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw UsageError("replay buffer index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return storage_[(oldest + i) % capacity_];
}

std::vector<Experience> ReplayBuffer::sample(std::size_t batch_size) {
  if (batch_size == 0) throw UsageError("batch size must be positive");
  if (size_ < batch_size)
    throw UsageError("replay buffer holds " + std::to_string(size_) + " transitions, batch needs " +
                     std::to_string(batch_size));
  std::vector<Experience> batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(at(uniform_index(rng_, size_)));
  return batch;
}

std::vector<Experience> ReplayBuffer::contents() const {
  std::vector<Experience> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(at(i));
  return out;
}

ReplayBuffer ReplayBuffer::restore(std::size_t capacity, const std::vector<Experience>& contents,
                                   Rng rng) {
  if (contents.size() > capacity) throw UsageError("restored contents exceed buffer capacity");
  ReplayBuffer b(capacity, rng);
  for (const auto& e : contents) b.push(e);
  return b;
}

}  // namespace drivepg::ddpg
