#ifndef WAVEGRASP_REPLAY_BUFFER_HPP_
#define WAVEGRASP_REPLAY_BUFFER_HPP_

#include <array>
#include <cstddef>
#include <vector>

#include "wavegrasp/mlp.hpp"
#include "wavegrasp/rng.hpp"
#include "wavegrasp/sim.hpp"

namespace wavegrasp::sac {

struct Transition {
  sim::StackedObservation obs;
  std::array<double, sim::kActionDim> action{};
  double reward = 0.0;
  sim::StackedObservation next_obs;
  // Set only when the episode ended by success; time-limit truncation stays false.
  bool done = false;
};

// Column-per-sample view of a sampled minibatch.
struct Batch {
  nn::Matrix obs;       // 30 x n
  nn::Matrix action;    // 5 x n
  nn::Vector reward;    // n
  nn::Matrix next_obs;  // 30 x n
  nn::Vector done;      // n, 0 or 1

  Eigen::Index size() const { return obs.cols(); }
};

// Fixed-capacity ring of transitions; the oldest entry is overwritten once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return storage_.empty(); }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  // Uniform with replacement over the filled region.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;
  Batch sample(std::size_t n, Rng& rng) const;
  Batch gather(const std::vector<std::size_t>& logical_indices) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // next slot to overwrite once full
  std::vector<Transition> storage_;
};

}  // namespace wavegrasp::sac

#endif  // WAVEGRASP_REPLAY_BUFFER_HPP_
