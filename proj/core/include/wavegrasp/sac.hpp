#ifndef WAVEGRASP_SAC_HPP_
#define WAVEGRASP_SAC_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "wavegrasp/mlp.hpp"
#include "wavegrasp/replay_buffer.hpp"
#include "wavegrasp/rng.hpp"
#include "wavegrasp/sim.hpp"

namespace wavegrasp::sac {

struct SacConfig {
  std::vector<int> actor_hidden{256, 256};
  std::vector<int> critic_hidden{256, 256, 256};
  double gamma = 0.98;
  double lr = 1e-4;
  double initial_alpha = 0.5;
  bool auto_alpha = true;
  double target_entropy = -static_cast<double>(sim::kActionDim);
  double tau = 0.005;
  int batch_size = 64;
  std::size_t buffer_capacity = 1'000'000;
  int warmup_steps = 1000;
  int updates_per_step = 1;
  double log_std_min = -20.0;
  double log_std_max = 2.0;
};

void validate(const SacConfig& cfg);

// Fixed affine input normalization: (obs - offset) / scale, per slot.
struct ObservationNormalizer {
  std::array<double, sim::kStackedObsDim> offset{};
  std::array<double, sim::kStackedObsDim> scale{};

  // Positions and distance in units of 0.25 m, yaw in units of pi.
  static ObservationNormalizer standard();

  nn::Matrix apply(const nn::Matrix& obs) const;
  nn::Vector apply(const sim::StackedObservation& obs) const;
};

enum class ActionMode { kStochastic, kDeterministic };

// log N(u; mean, exp(log_std)) - sum_i log(1 - tanh(u_i)^2), using the exact
// identity log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u)).
double squashed_gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                                  std::span<const double> u);

// Squashed-Gaussian policy: obs(30) -> hidden -> (mean(5), log_std(5)).
class Actor {
 public:
  Actor() = default;
  Actor(nn::Mlp net, ObservationNormalizer norm, double log_std_min, double log_std_max);

  const nn::Mlp& net() const { return net_; }
  nn::Mlp& net() { return net_; }
  const ObservationNormalizer& normalizer() const { return norm_; }
  double log_std_min() const { return log_std_min_; }
  double log_std_max() const { return log_std_max_; }

  // Mean and clamped log-std for one observation.
  void head(const sim::StackedObservation& obs, nn::Vector& mean, nn::Vector& log_std) const;

  sim::ActionCommand act(const sim::StackedObservation& obs, ActionMode mode, Rng& rng) const;

  double log_prob(const sim::StackedObservation& obs, std::span<const double> u) const;

 private:
  nn::Mlp net_;
  ObservationNormalizer norm_;
  double log_std_min_ = -20.0;
  double log_std_max_ = 2.0;
};

struct LossReport {
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double actor_loss = 0.0;
  double alpha_loss = 0.0;
  double alpha = 0.0;
  double mean_log_prob = 0.0;
};

// Bootstrap targets for a batch, kept separately for inspection.
struct CriticTargets {
  nn::Vector q1_next;
  nn::Vector q2_next;
  nn::Vector min_q_next;
  nn::Vector next_log_prob;
  nn::Vector target;  // r + gamma (1 - done) (min_q_next - alpha log_prob)
};

// Soft Actor-Critic with twin critics, Polyak-averaged targets and
// automatic entropy-temperature tuning.
class SacAgent {
 public:
  SacAgent(SacConfig cfg, Rng& init_rng, ObservationNormalizer norm = ObservationNormalizer::standard());

  const SacConfig& config() const { return cfg_; }

  // Throws InputError on non-finite observations.
  sim::ActionCommand select_action(const sim::StackedObservation& obs, ActionMode mode, Rng& rng) const;
  double log_prob(const sim::StackedObservation& obs, std::span<const double> u) const;

  // One SAC step on a minibatch drawn from `buffer`. Throws ProtocolError when
  // the buffer holds fewer than `batch_size` transitions.
  LossReport update(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng);
  LossReport update_on_batch(const Batch& batch, Rng& rng);

  // Pieces of update_on_batch with externally supplied standard-normal noise (5 x n).
  CriticTargets critic_targets(const Batch& batch, const nn::Matrix& next_noise) const;
  double actor_loss(const Batch& batch, const nn::Matrix& noise) const;
  void actor_step(const Batch& batch, const nn::Matrix& noise);

  double alpha() const;
  double log_alpha() const { return log_alpha_; }
  void set_log_alpha(double v) { log_alpha_ = v; }

  const Actor& actor() const { return actor_; }
  Actor& actor() { return actor_; }
  const nn::Mlp& q1() const { return q1_; }
  const nn::Mlp& q2() const { return q2_; }
  const nn::Mlp& q1_target() const { return q1_target_; }
  const nn::Mlp& q2_target() const { return q2_target_; }
  nn::Mlp& q1() { return q1_; }
  nn::Mlp& q2() { return q2_; }
  nn::Mlp& q1_target() { return q1_target_; }
  nn::Mlp& q2_target() { return q2_target_; }

 private:
  struct PolicyPass {
    nn::ForwardCache cache;
    nn::Matrix mean, log_std, sigma, u, action;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> clamped;
    nn::Vector log_prob;
  };
  PolicyPass policy_pass(const nn::Matrix& norm_obs, const nn::Matrix& noise, bool keep_cache) const;
  double critic_step(nn::Mlp& q, nn::AdamState& opt, const nn::Matrix& input, const nn::Vector& target);
  struct ActorPass {
    PolicyPass policy;
    nn::ForwardCache c1, c2;
    nn::Matrix v1, v2;
    double loss = 0.0;
  };
  ActorPass actor_forward(const nn::Matrix& norm_obs, const nn::Matrix& noise, double alpha, bool keep_cache) const;
  void actor_apply(const ActorPass& pass, const nn::Matrix& noise, double alpha);

  SacConfig cfg_;
  Actor actor_;
  nn::Mlp q1_, q2_, q1_target_, q2_target_;
  nn::AdamState actor_opt_, q1_opt_, q2_opt_;
  nn::AdamMoments alpha_moments_;
  double log_alpha_ = 0.0;
};

}  // namespace wavegrasp::sac

#endif  // WAVEGRASP_SAC_HPP_
