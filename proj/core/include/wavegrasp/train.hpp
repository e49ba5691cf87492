#ifndef WAVEGRASP_TRAIN_HPP_
#define WAVEGRASP_TRAIN_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "wavegrasp/checkpoint.hpp"
#include "wavegrasp/rng.hpp"
#include "wavegrasp/sac.hpp"
#include "wavegrasp/sim.hpp"

namespace wavegrasp::train {

struct TrainConfig {
  int episodes = 1000;
  int steps_per_episode = 100;
  int checkpoint_interval = 250;
  // Deterministic calm-water evaluation every N episodes; 0 disables it.
  int eval_interval = 0;
  int eval_episodes = 10;
  int smoothing_window = 5;
  int log_interval = 50;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out_dir = "runs/train";
  // Training episodes always run their full length unless this is set.
  bool terminate_on_success = false;
};

void validate(const TrainConfig& cfg);

struct EpisodeRecord {
  int episode = 0;
  double ret = 0.0;
  int steps = 0;
  // attached with cube z >= lift_success at some step of the episode
  bool success = false;
  double final_cube_z = 0.0;
  double wall_time_s = 0.0;
};

struct TrainResult {
  std::vector<EpisodeRecord> episodes;
  std::vector<double> smoothed_returns;
  PolicyCheckpoint final_checkpoint;
  std::filesystem::path final_checkpoint_path;
  std::vector<std::filesystem::path> checkpoint_paths;
  std::int64_t gradient_updates = 0;
};

// Replay entry for one environment step. done is set only when the episode
// ended by success; a time-limit truncation is stored with done = false.
sac::Transition make_transition(const sim::StackedObservation& obs, const sim::ActionCommand& action,
                                const sim::StepResult& step);

// Trailing mean; entry i averages series[max(0, i - window + 1) .. i].
std::vector<double> smooth(std::span<const double> series, int window);

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

// Trains a SAC agent in calm water. Writes under cfg.out_dir:
//   episodes.csv  episode,return,steps,success,final_cube_z
//   smoothed.csv  episode,return,smoothed_return
//   timing.csv    episode,wall_time_s
//   eval.csv      episode,success_rate,mean_return   (when eval_interval > 0)
//   checkpoints/ckpt_ep<k>_seed<seed>.wgc
// Everything except timing.csv is a pure function of the configs.
// Throws IoError before any compute when out_dir is not writable.
TrainResult train(const sim::EnvConfig& env_cfg, const sac::SacConfig& sac_cfg, const TrainConfig& cfg,
                  std::uint64_t config_hash = 0, const EpisodeCallback& on_episode = {});

}  // namespace wavegrasp::train

#endif  // WAVEGRASP_TRAIN_HPP_
