#include "wavegrasp/replay_buffer.hpp"

#include "wavegrasp/errors.hpp"

namespace wavegrasp::sac {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("sac.buffer_capacity", "must be > 0");
}

void ReplayBuffer::push(const Transition& t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(t);
    return;
  }
  storage_[head_] = t;
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw InputError("replay buffer index out of range");
  return storage_[(head_ + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (storage_.empty()) throw ProtocolError("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const { return gather(sample_indices(n, rng)); }

Batch ReplayBuffer::gather(const std::vector<std::size_t>& logical_indices) const {
  const auto n = static_cast<Eigen::Index>(logical_indices.size());
  Batch b;
  b.obs.resize(sim::kStackedObsDim, n);
  b.next_obs.resize(sim::kStackedObsDim, n);
  b.action.resize(sim::kActionDim, n);
  b.reward.resize(n);
  b.done.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = at(logical_indices[static_cast<std::size_t>(j)]);
    for (int i = 0; i < sim::kStackedObsDim; ++i) {
      b.obs(i, j) = t.obs.values[i];
      b.next_obs(i, j) = t.next_obs.values[i];
    }
    for (int i = 0; i < sim::kActionDim; ++i) b.action(i, j) = t.action[i];
    b.reward(j) = t.reward;
    b.done(j) = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace wavegrasp::sac
