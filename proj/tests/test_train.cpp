#include <gtest/gtest.h>

#include <fstream>

#include "support/temp_dir.hpp"
#include "wavegrasp/errors.hpp"
#include "wavegrasp/eval.hpp"
#include "wavegrasp/train.hpp"

namespace wg = wavegrasp;
using namespace wavegrasp::train;

namespace {

wg::sac::SacConfig tiny_sac() {
  wg::sac::SacConfig c;
  c.actor_hidden = {16, 16};
  c.critic_hidden = {16, 16};
  c.batch_size = 32;
  c.warmup_steps = 200;
  return c;
}

TrainConfig quick(const std::filesystem::path& dir, int episodes) {
  TrainConfig t;
  t.episodes = episodes;
  t.steps_per_episode = 30;
  t.checkpoint_interval = 4;
  t.log_interval = 1000;
  t.seed = 11;
  t.out_dir = dir;
  return t;
}

}  // namespace

TEST(Smooth, Examples) {
  const std::vector<double> s{3.0, -1.0, 4.0, 1.5, 9.0};
  EXPECT_EQ(smooth(s, 1), s);
  const std::vector<double> c(7, 2.5);
  EXPECT_EQ(smooth(c, 5), c);
  const auto z = smooth(std::vector<double>{0, 0, 0, 0, 5}, 5);
  EXPECT_EQ(z.back(), 1.0);
  const auto p = smooth(std::vector<double>{2, 4, 6, 8}, 3);
  EXPECT_EQ(p, (std::vector<double>{2, 3, 4, 6}));
  EXPECT_THROW(smooth(s, 0), wg::InputError);
  EXPECT_TRUE(smooth(std::vector<double>{}, 3).empty());
}

TEST(Train, TransitionDoneFlag) {
  wg::sim::StepResult step;
  step.reward = 1.5;
  step.truncated = true;
  const wg::sim::ActionCommand a(0.1, 0.2, 0.3, 0.4, 0.5);
  EXPECT_FALSE(make_transition({}, a, step).done);
  step.truncated = false;
  step.terminated = true;
  const auto t = make_transition({}, a, step);
  EXPECT_TRUE(t.done);
  EXPECT_EQ(t.reward, 1.5);
  EXPECT_EQ(t.action, a.values());
}

TEST(Train, WarmupOnlyBaselineRarelySucceeds) {
  wgtest::TempDir dir;
  auto sac = tiny_sac();
  sac.warmup_steps = 1'000'000;
  TrainConfig cfg = quick(dir.path(), 100);
  cfg.steps_per_episode = 100;
  cfg.checkpoint_interval = 1000;
  const auto r = train(wg::sim::EnvConfig{}, sac, cfg);
  EXPECT_EQ(r.gradient_updates, 0);
  int successes = 0;
  for (const auto& e : r.episodes) successes += e.success;
  EXPECT_LE(successes, 1);
}

TEST(Train, OutputsAndDeterminism) {
  wgtest::TempDir a, b;
  auto ra = train(wg::sim::EnvConfig{}, tiny_sac(), quick(a.path(), 10), 5);
  auto rb = train(wg::sim::EnvConfig{}, tiny_sac(), quick(b.path(), 10), 5);
  EXPECT_GT(ra.gradient_updates, 0);
  for (const char* f : {"episodes.csv", "smoothed.csv"}) {
    const std::string ta = wgtest::read_file(a / f);
    EXPECT_EQ(ta, wgtest::read_file(b / f)) << f;
    EXPECT_EQ(wgtest::count_lines(ta), 11) << f;
  }
  EXPECT_EQ(wgtest::read_file(a / "episodes.csv").substr(0, 41), "episode,return,steps,success,final_cube_z");
  EXPECT_EQ(wgtest::count_lines(wgtest::read_file(a / "timing.csv")), 11);
  EXPECT_EQ(ra.checkpoint_paths.size(), 3u);  // episodes 4, 8 and the final one
  EXPECT_TRUE(std::filesystem::exists(a / "checkpoints/ckpt_ep4_seed11.wgc"));
  EXPECT_TRUE(std::filesystem::exists(a / "checkpoints/ckpt_ep10_seed11.wgc"));
  EXPECT_EQ(ra.final_checkpoint.config_hash, 5u);
  EXPECT_EQ(wg::to_bytes(ra.final_checkpoint), wg::to_bytes(rb.final_checkpoint));
  ASSERT_EQ(ra.smoothed_returns.size(), 10u);
  for (const auto& e : ra.episodes) EXPECT_EQ(e.steps, 30);
}

// A periodic checkpoint from a longer run reproduces the agent of a run that
// stopped at that episode.
TEST(Train, PeriodicCheckpointMatchesShorterRun) {
  wgtest::TempDir a, b;
  const auto short_run = train(wg::sim::EnvConfig{}, tiny_sac(), quick(a.path(), 4));
  train(wg::sim::EnvConfig{}, tiny_sac(), quick(b.path(), 8));
  const auto loaded = wg::load_checkpoint(b / "checkpoints/ckpt_ep4_seed11.wgc");
  EXPECT_EQ(wg::to_bytes(loaded), wg::to_bytes(short_run.final_checkpoint));

  wg::eval::EvalProtocol p;
  p.trials = 3;
  const auto r1 = wg::eval::evaluate(loaded, wg::sim::EnvConfig{}, p);
  const auto r2 = wg::eval::evaluate(short_run.final_checkpoint, wg::sim::EnvConfig{}, p);
  for (std::size_t s = 0; s < r1.states.size(); ++s) {
    for (std::size_t t = 0; t < r1.states[s].traces.size(); ++t) {
      const auto& x = r1.states[s].traces[t].rows;
      const auto& y = r2.states[s].traces[t].rows;
      ASSERT_EQ(x.size(), y.size());
      for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(x[i].dist, y[i].dist);
    }
  }
}

TEST(Train, EvalCsvWhenEnabled) {
  wgtest::TempDir dir;
  auto cfg = quick(dir.path(), 4);
  cfg.eval_interval = 2;
  cfg.eval_episodes = 2;
  train(wg::sim::EnvConfig{}, tiny_sac(), cfg);
  EXPECT_EQ(wgtest::count_lines(wgtest::read_file(dir / "eval.csv")), 3);
}

TEST(Train, UnwritableOutputFailsBeforeCompute) {
  wgtest::TempDir dir;
  std::ofstream(dir / "blocker") << "x";
  int callbacks = 0;
  EXPECT_THROW(train(wg::sim::EnvConfig{}, tiny_sac(), quick(dir / "blocker/run", 3), 0,
                     [&](const EpisodeRecord&) { ++callbacks; }),
               wg::IoError);
  EXPECT_EQ(callbacks, 0);
}

TEST(Train, InvalidConfig) {
  wgtest::TempDir dir;
  auto cfg = quick(dir.path(), 3);
  cfg.smoothing_window = 0;
  EXPECT_THROW(train(wg::sim::EnvConfig{}, tiny_sac(), cfg), wg::ConfigError);
  cfg = quick(dir.path(), 0);
  EXPECT_THROW(train(wg::sim::EnvConfig{}, tiny_sac(), cfg), wg::ConfigError);
}
