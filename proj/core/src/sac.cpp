#include "wavegrasp/sac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wavegrasp/errors.hpp"

namespace wavegrasp::sac {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 ln(2 pi)
constexpr double kLn2 = std::numbers::ln2;
// Largest magnitude an emitted action may take; keeps tanh output strictly inside (-1, 1).
constexpr double kActionBound = 1.0 - 1e-12;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

// log(1 - tanh(u)^2), exact and stable for large |u|.
double log_one_minus_tanh_sq(double u) { return 2.0 * (kLn2 - u - softplus(-2.0 * u)); }

std::vector<int> with_io(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w;
  w.push_back(in);
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

nn::Matrix standard_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  nn::Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = n(rng);
  }
  return m;
}

nn::Matrix critic_input(const nn::Matrix& norm_obs, const nn::Matrix& action) {
  nn::Matrix x(norm_obs.rows() + action.rows(), norm_obs.cols());
  x.topRows(norm_obs.rows()) = norm_obs;
  x.bottomRows(action.rows()) = action;
  return x;
}

void check_finite(const sim::StackedObservation& obs) {
  for (double v : obs.values) {
    if (!std::isfinite(v)) throw InputError("observation contains a non-finite value");
  }
}

}  // namespace

void validate(const SacConfig& cfg) {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be finite and > 0");
  };
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw ConfigError("sac.gamma", "must lie in [0, 1)");
  positive(cfg.lr, "sac.lr");
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) throw ConfigError("sac.tau", "must lie in (0, 1]");
  if (!(cfg.initial_alpha >= 0.0) || (cfg.auto_alpha && cfg.initial_alpha == 0.0)) {
    throw ConfigError("sac.initial_alpha", "must be > 0 with auto tuning, >= 0 otherwise");
  }
  if (cfg.batch_size <= 0) throw ConfigError("sac.batch_size", "must be > 0");
  if (cfg.buffer_capacity == 0) throw ConfigError("sac.buffer_capacity", "must be > 0");
  if (cfg.warmup_steps < 0) throw ConfigError("sac.warmup_steps", "must be >= 0");
  if (cfg.updates_per_step < 0) throw ConfigError("sac.updates_per_step", "must be >= 0");
  if (!(cfg.log_std_min <= cfg.log_std_max)) throw ConfigError("sac.log_std_min", "must be <= log_std_max");
  for (int h : cfg.actor_hidden) {
    if (h <= 0) throw ConfigError("sac.actor_hidden", "widths must be positive");
  }
  for (int h : cfg.critic_hidden) {
    if (h <= 0) throw ConfigError("sac.critic_hidden", "widths must be positive");
  }
}

ObservationNormalizer ObservationNormalizer::standard() {
  ObservationNormalizer n;
  constexpr std::array<double, sim::kObsDim> slot_scale{0.25, 0.25, 0.25, 0.25, 0.25,
                                                        0.25, 0.25, 1.0,  std::numbers::pi,
                                                        std::numbers::pi};
  for (int age = 0; age < sim::kStackDepth; ++age) {
    for (int i = 0; i < sim::kObsDim; ++i) n.scale[age * sim::kObsDim + i] = slot_scale[i];
  }
  return n;
}

nn::Matrix ObservationNormalizer::apply(const nn::Matrix& obs) const {
  nn::Matrix out(obs.rows(), obs.cols());
  for (Eigen::Index r = 0; r < obs.rows(); ++r) {
    out.row(r) = (obs.row(r).array() - offset[r]) / scale[r];
  }
  return out;
}

nn::Vector ObservationNormalizer::apply(const sim::StackedObservation& obs) const {
  nn::Vector out(sim::kStackedObsDim);
  for (int i = 0; i < sim::kStackedObsDim; ++i) out(i) = (obs.values[i] - offset[i]) / scale[i];
  return out;
}

double squashed_gaussian_log_prob(std::span<const double> mean, std::span<const double> log_std,
                                  std::span<const double> u) {
  if (mean.size() != u.size() || log_std.size() != u.size()) {
    throw InputError("log_prob: dimension mismatch");
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!std::isfinite(u[i])) throw InputError("log_prob: non-finite pre-squash action");
    const double z = (u[i] - mean[i]) / std::exp(log_std[i]);
    lp += -0.5 * z * z - log_std[i] - kHalfLog2Pi - log_one_minus_tanh_sq(u[i]);
  }
  return lp;
}

Actor::Actor(nn::Mlp net, ObservationNormalizer norm, double log_std_min, double log_std_max)
    : net_(std::move(net)), norm_(norm), log_std_min_(log_std_min), log_std_max_(log_std_max) {
  if (net_.input_size() != sim::kStackedObsDim || net_.output_size() != 2 * sim::kActionDim) {
    throw CheckpointIncompatibleError("actor network must map " + std::to_string(sim::kStackedObsDim) +
                                      " inputs to " + std::to_string(2 * sim::kActionDim) + " outputs");
  }
}

void Actor::head(const sim::StackedObservation& obs, nn::Vector& mean, nn::Vector& log_std) const {
  check_finite(obs);
  const nn::Vector out = net_.forward(norm_.apply(obs));
  mean = out.head(sim::kActionDim);
  log_std = out.tail(sim::kActionDim).cwiseMax(log_std_min_).cwiseMin(log_std_max_);
}

sim::ActionCommand Actor::act(const sim::StackedObservation& obs, ActionMode mode, Rng& rng) const {
  nn::Vector mean, log_std;
  head(obs, mean, log_std);
  std::array<double, sim::kActionDim> a{};
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < sim::kActionDim; ++i) {
    double u = mean(i);
    if (mode == ActionMode::kStochastic) u += std::exp(log_std(i)) * n(rng);
    a[i] = std::clamp(std::tanh(u), -kActionBound, kActionBound);
  }
  return sim::ActionCommand(a);
}

double Actor::log_prob(const sim::StackedObservation& obs, std::span<const double> u) const {
  nn::Vector mean, log_std;
  head(obs, mean, log_std);
  return squashed_gaussian_log_prob({mean.data(), static_cast<std::size_t>(mean.size())},
                                    {log_std.data(), static_cast<std::size_t>(log_std.size())}, u);
}

SacAgent::SacAgent(SacConfig cfg, Rng& init_rng, ObservationNormalizer norm) : cfg_(std::move(cfg)) {
  validate(cfg_);
  constexpr int kCriticIn = sim::kStackedObsDim + sim::kActionDim;
  actor_ = Actor(nn::Mlp::random(with_io(sim::kStackedObsDim, cfg_.actor_hidden, 2 * sim::kActionDim), init_rng),
                 norm, cfg_.log_std_min, cfg_.log_std_max);
  q1_ = nn::Mlp::random(with_io(kCriticIn, cfg_.critic_hidden, 1), init_rng);
  q2_ = nn::Mlp::random(with_io(kCriticIn, cfg_.critic_hidden, 1), init_rng);
  q1_target_ = q1_;
  q2_target_ = q2_;
  const nn::AdamConfig adam{cfg_.lr, 0.9, 0.999, 1e-8};
  actor_opt_ = nn::AdamState(actor_.net(), adam);
  q1_opt_ = nn::AdamState(q1_, adam);
  q2_opt_ = nn::AdamState(q2_, adam);
  log_alpha_ = cfg_.initial_alpha > 0.0 ? std::log(cfg_.initial_alpha) : -std::numeric_limits<double>::infinity();
}

double SacAgent::alpha() const { return cfg_.auto_alpha ? std::exp(log_alpha_) : cfg_.initial_alpha; }

sim::ActionCommand SacAgent::select_action(const sim::StackedObservation& obs, ActionMode mode, Rng& rng) const {
  return actor_.act(obs, mode, rng);
}

double SacAgent::log_prob(const sim::StackedObservation& obs, std::span<const double> u) const {
  return actor_.log_prob(obs, u);
}

SacAgent::PolicyPass SacAgent::policy_pass(const nn::Matrix& norm_obs, const nn::Matrix& noise,
                                           bool keep_cache) const {
  PolicyPass p;
  const nn::Matrix out = actor_.net().forward(norm_obs, keep_cache ? &p.cache : nullptr);
  const Eigen::Index n = norm_obs.cols();
  p.mean = out.topRows(sim::kActionDim);
  const nn::Matrix raw_log_std = out.bottomRows(sim::kActionDim);
  p.log_std = raw_log_std.cwiseMax(cfg_.log_std_min).cwiseMin(cfg_.log_std_max);
  p.clamped = (raw_log_std.array() < cfg_.log_std_min) || (raw_log_std.array() > cfg_.log_std_max);
  p.sigma = p.log_std.array().exp().matrix();
  p.u = p.mean + p.sigma.cwiseProduct(noise);
  p.action = p.u.array().tanh().matrix();
  p.log_prob.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double lp = 0.0;
    for (int i = 0; i < sim::kActionDim; ++i) {
      const double e = noise(i, j);
      lp += -0.5 * e * e - p.log_std(i, j) - kHalfLog2Pi - log_one_minus_tanh_sq(p.u(i, j));
    }
    p.log_prob(j) = lp;
  }
  return p;
}

CriticTargets SacAgent::critic_targets(const Batch& batch, const nn::Matrix& next_noise) const {
  const nn::Matrix next_obs = actor_.normalizer().apply(batch.next_obs);
  const PolicyPass next = policy_pass(next_obs, next_noise, false);
  const nn::Matrix x = critic_input(next_obs, next.action);
  CriticTargets t;
  t.q1_next = q1_target_.forward(x, nullptr).row(0).transpose();
  t.q2_next = q2_target_.forward(x, nullptr).row(0).transpose();
  t.min_q_next = t.q1_next.cwiseMin(t.q2_next);
  t.next_log_prob = next.log_prob;
  const double a = alpha();
  const nn::Vector soft_value =
      a == 0.0 ? t.min_q_next : nn::Vector(t.min_q_next - a * next.log_prob);
  t.target = batch.reward.array() + cfg_.gamma * (1.0 - batch.done.array()) * soft_value.array();
  return t;
}

double SacAgent::critic_step(nn::Mlp& q, nn::AdamState& opt, const nn::Matrix& input, const nn::Vector& target) {
  nn::ForwardCache cache;
  const nn::Matrix pred = q.forward(input, &cache);
  const double n = static_cast<double>(input.cols());
  const nn::Matrix err = pred - target.transpose();
  const double loss = 0.5 * err.squaredNorm() / n;
  nn::Gradients grads;
  q.backward(cache, err / n, &grads, false);
  opt.apply(q, grads);
  return loss;
}

SacAgent::ActorPass SacAgent::actor_forward(const nn::Matrix& norm_obs, const nn::Matrix& noise, double alpha,
                                            bool keep_cache) const {
  ActorPass pass;
  pass.policy = policy_pass(norm_obs, noise, keep_cache);
  const double inv_n = 1.0 / static_cast<double>(norm_obs.cols());
  const nn::Matrix x = critic_input(norm_obs, pass.policy.action);
  pass.v1 = q1_.forward(x, keep_cache ? &pass.c1 : nullptr);
  pass.v2 = q2_.forward(x, keep_cache ? &pass.c2 : nullptr);
  const nn::Vector min_q = pass.v1.row(0).cwiseMin(pass.v2.row(0)).transpose();
  pass.loss = (alpha == 0.0 ? -min_q.sum() : (alpha * pass.policy.log_prob - min_q).sum()) * inv_n;
  return pass;
}

void SacAgent::actor_apply(const ActorPass& pass, const nn::Matrix& noise, double alpha) {
  const PolicyPass& p = pass.policy;
  const Eigen::Index n = noise.cols();
  const double inv_n = 1.0 / static_cast<double>(n);

  // dL/dQ_k = -1/n on the critic that attains the minimum, 0 on the other.
  nn::Matrix g1 = nn::Matrix::Zero(1, n);
  nn::Matrix g2 = nn::Matrix::Zero(1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (pass.v1(0, j) <= pass.v2(0, j)) {
      g1(0, j) = -inv_n;
    } else {
      g2(0, j) = -inv_n;
    }
  }
  const nn::Matrix dx1 = q1_.backward(pass.c1, g1, nullptr, true);
  const nn::Matrix dx2 = q2_.backward(pass.c2, g2, nullptr, true);
  const nn::Matrix d_action = dx1.bottomRows(sim::kActionDim) + dx2.bottomRows(sim::kActionDim);

  // log_prob depends on u through the tanh correction (d/du = 2 tanh u) and
  // on log_std directly (-1); the Gaussian term is constant under reparameterization.
  const auto a = p.action.array();
  const nn::Matrix d_u = (d_action.array() * (1.0 - a * a) + (alpha * inv_n) * 2.0 * a).matrix();
  nn::Matrix d_log_std = (d_u.array() * p.sigma.array() * noise.array() - alpha * inv_n).matrix();
  d_log_std = p.clamped.select(0.0, d_log_std);

  nn::Matrix d_out(2 * sim::kActionDim, n);
  d_out.topRows(sim::kActionDim) = d_u;
  d_out.bottomRows(sim::kActionDim) = d_log_std;
  nn::Gradients grads;
  actor_.net().backward(p.cache, d_out, &grads, false);
  actor_opt_.apply(actor_.net(), grads);
}

double SacAgent::actor_loss(const Batch& batch, const nn::Matrix& noise) const {
  return actor_forward(actor_.normalizer().apply(batch.obs), noise, alpha(), false).loss;
}

void SacAgent::actor_step(const Batch& batch, const nn::Matrix& noise) {
  const ActorPass pass = actor_forward(actor_.normalizer().apply(batch.obs), noise, alpha(), true);
  actor_apply(pass, noise, alpha());
}

LossReport SacAgent::update(const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  if (batch_size == 0) throw ProtocolError("update: batch size must be > 0");
  if (buffer.size() < batch_size) {
    throw ProtocolError("update: replay buffer holds " + std::to_string(buffer.size()) +
                        " transitions, fewer than the batch size " + std::to_string(batch_size));
  }
  return update_on_batch(buffer.sample(batch_size, rng), rng);
}

LossReport SacAgent::update_on_batch(const Batch& batch, Rng& rng) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw ProtocolError("update: empty batch");
  LossReport report;
  const double a = alpha();

  const nn::Matrix next_noise = standard_normal(sim::kActionDim, n, rng);
  const CriticTargets targets = critic_targets(batch, next_noise);

  const nn::Matrix obs = actor_.normalizer().apply(batch.obs);
  const nn::Matrix x = critic_input(obs, batch.action);
  report.q1_loss = critic_step(q1_, q1_opt_, x, targets.target);
  report.q2_loss = critic_step(q2_, q2_opt_, x, targets.target);

  const nn::Matrix noise = standard_normal(sim::kActionDim, n, rng);
  const ActorPass pass = actor_forward(obs, noise, a, true);
  actor_apply(pass, noise, a);
  report.actor_loss = pass.loss;
  report.mean_log_prob = pass.policy.log_prob.mean();

  if (cfg_.auto_alpha) {
    // L(log_alpha) = -log_alpha * mean(log_prob + target_entropy)
    const double mean_term = report.mean_log_prob + cfg_.target_entropy;
    report.alpha_loss = -log_alpha_ * mean_term;
    const double grad = -mean_term;
    nn::adam_update({&log_alpha_, 1}, {&grad, 1}, alpha_moments_, nn::AdamConfig{cfg_.lr, 0.9, 0.999, 1e-8});
  }
  report.alpha = alpha();

  nn::soft_update(q1_target_, q1_, cfg_.tau);
  nn::soft_update(q2_target_, q2_, cfg_.tau);
  return report;
}

}  // namespace wavegrasp::sac
