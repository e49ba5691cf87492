#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "support/temp_dir.hpp"
#include "wavegrasp/config_io.hpp"
#include "wavegrasp/errors.hpp"

namespace wg = wavegrasp;

TEST(Config, ShippedDefaultFileMatchesBuiltIns) {
  const auto cfg = wg::load_run_config(std::filesystem::path(WAVEGRASP_SOURCE_DIR) / "configs/default.yaml");
  EXPECT_EQ(wg::to_json(cfg), wg::to_json(wg::RunConfig{}));
}

TEST(Config, EveryKeyRoundTripsThroughJson) {
  const auto j = wg::to_json(wg::RunConfig{});
  for (const auto& key : wg::config_keys()) {
    const auto dot = key.find('.');
    EXPECT_TRUE(j.at(key.substr(0, dot)).contains(key.substr(dot + 1))) << key;
  }
}

TEST(Config, FileOverridesDefaultsAndFlagOverridesFile) {
  wgtest::TempDir dir;
  std::ofstream(dir / "c.yaml") << "env:\n  beta_pos: 0.02\nsac:\n  actor_hidden: [64, 64]\n  lr: 3.0e-4\n";
  auto cfg = wg::load_run_config(dir / "c.yaml");
  EXPECT_EQ(cfg.env.beta_pos, 0.02);
  EXPECT_EQ(cfg.sac.lr, 3e-4);
  EXPECT_EQ(cfg.sac.actor_hidden, (std::vector<int>{64, 64}));
  EXPECT_EQ(cfg.env.beta_yaw, 0.1);  // untouched default
  wg::apply_override(cfg, "env.beta_pos=0.04");
  wg::apply_override(cfg, "eval.sea_states=[1, 2]");
  EXPECT_EQ(cfg.env.beta_pos, 0.04);
  EXPECT_EQ(cfg.eval.sea_states, (std::vector<int>{1, 2}));
}

TEST(Config, Errors) {
  wgtest::TempDir dir;
  try {
    wg::load_run_config(dir / "nope.yaml");
    FAIL();
  } catch (const wg::IoError& e) {
    EXPECT_NE(std::string(e.what()).find("nope.yaml"), std::string::npos);
  }
  wg::RunConfig cfg;
  try {
    wg::apply_override(cfg, "env.bogus=1");
    FAIL();
  } catch (const wg::ConfigError& e) {
    EXPECT_EQ(e.field(), "env.bogus");
  }
  EXPECT_THROW(wg::apply_override(cfg, "sac.lr=fast"), wg::ConfigError);
  EXPECT_THROW(wg::apply_override(cfg, "no_equals_sign"), wg::ConfigError);
  EXPECT_THROW(wg::merge_yaml(cfg, "train: [1, 2]"), wg::ConfigError);
  EXPECT_THROW(wg::merge_yaml(cfg, "oops: {a: 1}"), wg::ConfigError);
  EXPECT_THROW(wg::merge_yaml(cfg, "env: {cube_side: [0.1"), wg::ConfigError);

  wg::apply_override(cfg, "env.cube_side=0.2");
  try {
    wg::validate(cfg);
    FAIL();
  } catch (const wg::ConfigError& e) {
    EXPECT_EQ(e.field(), "env.w_max");
  }
}

TEST(Config, HashTracksEnvAndSacOnly) {
  wg::RunConfig a, b;
  EXPECT_EQ(wg::config_hash(a), wg::config_hash(b));
  b.train.episodes = 3;
  EXPECT_EQ(wg::config_hash(a), wg::config_hash(b));
  b.sac.gamma = 0.9;
  EXPECT_NE(wg::config_hash(a), wg::config_hash(b));
}
