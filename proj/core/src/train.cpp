#include "wavegrasp/train.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <spdlog/spdlog.h>

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

#include "wavegrasp/errors.hpp"
#include "wavegrasp/eval.hpp"
#include "wavegrasp/replay_buffer.hpp"

namespace wavegrasp::train {

namespace {

// Stream ids for derive_seed.
constexpr std::uint64_t kInitStream = 0x1000;
constexpr std::uint64_t kActStream = 0x2000;
constexpr std::uint64_t kEpisodeStream = 0x100000;
constexpr std::uint64_t kEvalStream = 0x200000;

std::ofstream open_csv(const std::filesystem::path& path, const char* header) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << header << '\n' << std::setprecision(17);
  return out;
}

// Flushes subnormal results and operands to zero while alive. Late in
// training, saturated tanh derivatives feed subnormals into the network
// products and slow every update by about 40%.
class FlushDenormals {
 public:
#if defined(__SSE2__)
  FlushDenormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }  // FTZ | DAZ
  ~FlushDenormals() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
};

void ensure_writable(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "checkpoints", ec);
  if (ec) throw IoError("output directory not writable: " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out || !(out << "ok")) throw IoError("output directory not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.episodes <= 0) throw ConfigError("train.episodes", "must be > 0");
  if (cfg.steps_per_episode <= 0) throw ConfigError("train.steps_per_episode", "must be > 0");
  if (cfg.checkpoint_interval <= 0) throw ConfigError("train.checkpoint_interval", "must be > 0");
  if (cfg.eval_interval < 0) throw ConfigError("train.eval_interval", "must be >= 0");
  if (cfg.eval_episodes <= 0) throw ConfigError("train.eval_episodes", "must be > 0");
  if (cfg.smoothing_window < 1) throw ConfigError("train.smoothing_window", "must be >= 1");
  if (cfg.log_interval <= 0) throw ConfigError("train.log_interval", "must be > 0");
}

sac::Transition make_transition(const sim::StackedObservation& obs, const sim::ActionCommand& action,
                                const sim::StepResult& step) {
  return {obs, action.values(), step.reward, step.observation, step.terminated};
}

std::vector<double> smooth(std::span<const double> series, int window) {
  if (window < 1) throw InputError("smooth: window must be >= 1");
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t begin = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double s = 0.0;
    for (std::size_t k = begin; k <= i; ++k) s += series[k];
    out[i] = s / static_cast<double>(i + 1 - begin);
  }
  return out;
}

TrainResult train(const sim::EnvConfig& env_cfg, const sac::SacConfig& sac_cfg, const TrainConfig& cfg,
                  std::uint64_t config_hash, const EpisodeCallback& on_episode) {
  validate(cfg);
  sac::validate(sac_cfg);
  sim::EnvConfig train_env_cfg = env_cfg;
  train_env_cfg.terminate_on_success = cfg.terminate_on_success;
  sim::validate(train_env_cfg);
  ensure_writable(cfg.out_dir);
  const FlushDenormals flush_guard;

  auto episodes_csv = open_csv(cfg.out_dir / "episodes.csv", "episode,return,steps,success,final_cube_z");
  auto timing_csv = open_csv(cfg.out_dir / "timing.csv", "episode,wall_time_s");
  std::ofstream eval_csv;
  if (cfg.eval_interval > 0) eval_csv = open_csv(cfg.out_dir / "eval.csv", "episode,success_rate,mean_return");

  Rng init_rng(derive_seed(cfg.seed, kInitStream));
  Rng rng(derive_seed(cfg.seed, kActStream));
  sac::SacAgent agent(sac_cfg, init_rng);
  sac::ReplayBuffer buffer(sac_cfg.buffer_capacity);
  sim::Environment env(train_env_cfg);
  env.set_step_limit(cfg.steps_per_episode);
  std::uniform_real_distribution<double> uniform_action(-1.0, 1.0);

  TrainResult result;
  std::vector<double> returns;
  std::int64_t total_steps = 0;
  const auto t_start = std::chrono::steady_clock::now();

  auto write_checkpoint = [&](int episode) {
    PolicyCheckpoint ckpt = PolicyCheckpoint::from_agent(agent, config_hash, static_cast<std::uint64_t>(episode),
                                                         cfg.seed, true);
    const auto path = cfg.out_dir / "checkpoints" / checkpoint_filename(static_cast<std::uint64_t>(episode), cfg.seed);
    save_checkpoint(ckpt, path);
    result.checkpoint_paths.push_back(path);
    return std::pair{std::move(ckpt), path};
  };

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    sim::StackedObservation obs = env.reset(derive_seed(cfg.seed, kEpisodeStream + ep), wave::calm());
    EpisodeRecord rec;
    rec.episode = ep;
    while (env.active()) {
      sim::ActionCommand action;
      if (total_steps < sac_cfg.warmup_steps) {
        std::array<double, sim::kActionDim> a{};
        for (auto& v : a) v = uniform_action(rng);
        action = sim::ActionCommand(a);
      } else {
        action = agent.select_action(obs, sac::ActionMode::kStochastic, rng);
      }
      const sim::StepResult step = env.step(action);
      buffer.push(make_transition(obs, action, step));
      obs = step.observation;
      total_steps += 1;
      rec.ret += step.reward;
      rec.steps += 1;
      rec.success = rec.success || step.info.success;
      rec.final_cube_z = step.info.cube_z;

      if (total_steps >= sac_cfg.warmup_steps && buffer.size() >= static_cast<std::size_t>(sac_cfg.batch_size)) {
        for (int u = 0; u < sac_cfg.updates_per_step; ++u) {
          agent.update(buffer, static_cast<std::size_t>(sac_cfg.batch_size), rng);
          result.gradient_updates += 1;
        }
      }
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    returns.push_back(rec.ret);
    episodes_csv << rec.episode << ',' << rec.ret << ',' << rec.steps << ',' << (rec.success ? 1 : 0) << ','
                 << rec.final_cube_z << '\n';
    timing_csv << rec.episode << ',' << rec.wall_time_s << '\n';
    result.episodes.push_back(rec);
    if (on_episode) on_episode(rec);

    const int done_episodes = ep + 1;
    if (done_episodes % cfg.log_interval == 0) {
      const int window = std::min(cfg.log_interval, done_episodes);
      double mean_ret = 0.0;
      int succ = 0;
      for (int k = done_episodes - window; k < done_episodes; ++k) {
        mean_ret += result.episodes[k].ret;
        succ += result.episodes[k].success ? 1 : 0;
      }
      spdlog::info("episode {:5d}  mean return {:8.2f}  success {:5.1f}%  alpha {:.4f}  updates {}  {:.0f}s",
                   done_episodes, mean_ret / window, 100.0 * succ / window, agent.alpha(), result.gradient_updates,
                   rec.wall_time_s);
    }
    if (cfg.eval_interval > 0 && done_episodes % cfg.eval_interval == 0) {
      eval::EvalProtocol proto;
      proto.trials = cfg.eval_episodes;
      proto.time_limit_s = cfg.steps_per_episode * train_env_cfg.dt;
      proto.success_lift = train_env_cfg.lift_success;
      proto.sea_states = {0};
      proto.base_seed = derive_seed(cfg.seed, kEvalStream);
      eval::ActorPolicy policy(agent.actor());
      const auto report = eval::evaluate(policy, env_cfg, proto);
      double mean_ret = 0.0;
      for (const auto& t : report.states[0].traces) {
        for (const auto& row : t.rows) mean_ret += row.reward;
      }
      mean_ret /= cfg.eval_episodes;
      eval_csv << done_episodes << ',' << report.states[0].success_rate << ',' << mean_ret << '\n';
      eval_csv.flush();
    }
    if (done_episodes % cfg.checkpoint_interval == 0 && done_episodes != cfg.episodes) {
      write_checkpoint(done_episodes);
    }
  }

  auto [final_ckpt, final_path] = write_checkpoint(cfg.episodes);
  result.final_checkpoint = std::move(final_ckpt);
  result.final_checkpoint_path = final_path;

  result.smoothed_returns = smooth(returns, cfg.smoothing_window);
  auto smoothed_csv = open_csv(cfg.out_dir / "smoothed.csv", "episode,return,smoothed_return");
  for (std::size_t i = 0; i < returns.size(); ++i) {
    smoothed_csv << i << ',' << returns[i] << ',' << result.smoothed_returns[i] << '\n';
  }
  return result;
}

}  // namespace wavegrasp::train
