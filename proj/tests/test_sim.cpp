#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <vector>

#include "wavegrasp/errors.hpp"
#include "wavegrasp/sim.hpp"

namespace wg = wavegrasp;
using namespace wavegrasp::sim;
constexpr double kPi = std::numbers::pi;

namespace {

ActionCommand zero_action() { return ActionCommand(0, 0, 0, 0, 1); }

// Episode with the open gripper placed right on the cube, yaw aligned.
Environment env_at_cube(EnvConfig cfg = {}, int sea = 0) {
  Environment env(cfg);
  env.reset(3, wg::wave::preset(sea));
  WorldState s = env.state();
  s.gripper.commanded_position = s.cube.position - s.wave_offset;
  s.gripper.world_position = s.cube.position;
  s.gripper.yaw = s.cube.yaw;
  env.restore(s);
  return env;
}

// Closes the gripper on the cube until it is attached.
void grasp(Environment& env) {
  for (int i = 0; i < 5 && !env.state().cube.attached; ++i) env.step(ActionCommand(0, 0, 0, 0, -1));
  ASSERT_TRUE(env.state().cube.attached);
}

std::vector<double> rollout(std::uint64_t seed, int sea, std::uint64_t action_seed) {
  Environment env(EnvConfig{});
  auto obs = env.reset(seed, wg::wave::preset(sea));
  std::vector<double> trace(obs.values.begin(), obs.values.end());
  std::mt19937_64 rng(action_seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (env.active()) {
    const auto r = env.step(ActionCommand(u(rng), u(rng), u(rng), u(rng), u(rng)));
    trace.insert(trace.end(), r.observation.values.begin(), r.observation.values.end());
    trace.push_back(r.reward);
    trace.push_back(r.terminated);
    trace.push_back(r.truncated);
  }
  return trace;
}

}  // namespace

TEST(Sim, ResetIsDeterministic) {
  Environment a(EnvConfig{}), b(EnvConfig{});
  EXPECT_EQ(a.reset(7, wg::wave::calm()), b.reset(7, wg::wave::calm()));
  EXPECT_EQ(a.state().cube.position, b.state().cube.position);
  EXPECT_EQ(a.state().cube.yaw, b.state().cube.yaw);
}

TEST(Sim, ResetPose) {
  Environment env(EnvConfig{});
  const auto obs = env.reset(11, wg::wave::preset(1));
  const auto& s = env.state();
  EXPECT_EQ(s.gripper.commanded_position, Eigen::Vector3d(0, 0, 0.35));
  EXPECT_EQ(s.gripper.yaw, 0.0);
  EXPECT_EQ(s.gripper.aperture, 0.10);
  EXPECT_EQ(s.step, 0);
  EXPECT_EQ(s.cube.position.z(), 0.025);
  EXPECT_GE(s.cube.yaw, -kPi);
  EXPECT_LT(s.cube.yaw, kPi);
  for (int i = 0; i < 2; ++i) {
    EXPECT_GE(s.cube.position[i], -0.15);
    EXPECT_LE(s.cube.position[i], 0.15);
  }
  // Heave phase 0 at t = 0, surge and sway are not.
  EXPECT_EQ(s.wave_offset.z(), 0.0);
  for (int age = 1; age < kStackDepth; ++age) {
    EXPECT_TRUE(std::equal(obs.slot(0).begin(), obs.slot(0).end(), obs.slot(age).begin()));
  }
}

TEST(Sim, CalmWaveOffsetZeroAtReset) {
  Environment env(EnvConfig{});
  env.reset(1, wg::wave::calm());
  EXPECT_EQ(env.state().wave_offset, Eigen::Vector3d::Zero());
  EXPECT_EQ(env.state().gripper.world_position, env.state().gripper.commanded_position);
}

TEST(Sim, SpawnMeanOverManyResets) {
  Environment env(EnvConfig{});
  double sx = 0, sy = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    env.reset(static_cast<std::uint64_t>(i), wg::wave::calm());
    sx += env.state().cube.position.x();
    sy += env.state().cube.position.y();
  }
  EXPECT_NEAR(sx / n, 0.0, 0.01);
  EXPECT_NEAR(sy / n, 0.0, 0.01);
}

TEST(Sim, PositionIncrement) {
  Environment env(EnvConfig{});
  env.reset(1, wg::wave::calm());
  WorldState s = env.state();
  s.gripper.commanded_position.x() = 0.10;
  env.restore(s);
  env.step(ActionCommand(0.4, 0, 0, 0, 1));
  EXPECT_NEAR(env.state().gripper.commanded_position.x(), 0.12, 1e-15);
}

TEST(Sim, YawWraps) {
  Environment env(EnvConfig{});
  env.reset(1, wg::wave::calm());
  WorldState s = env.state();
  s.gripper.yaw = kPi - 0.01;
  env.restore(s);
  env.step(ActionCommand(0, 0, 0, 1.0, 1));
  EXPECT_NEAR(env.state().gripper.yaw, -kPi + 0.09, 1e-12);
}

TEST(Sim, ActionClamp) {
  const ActionCommand a(5, -7, 0.5, 1e9, -1e9);
  EXPECT_EQ(a.dx(), 1.0);
  EXPECT_EQ(a.dy(), -1.0);
  EXPECT_EQ(a.dz(), 0.5);
  EXPECT_EQ(a.dyaw(), 1.0);
  EXPECT_EQ(a.g_state(), -1.0);
  EXPECT_THROW(ActionCommand(NAN, 0, 0, 0, 0), wg::InputError);
}

TEST(Sim, ZeroActionCalmIsFixedPoint) {
  Environment env(EnvConfig{});
  env.reset(5, wg::wave::calm());
  const WorldState before = env.state();
  const double dist0 = build_observation(before, env.config()).dist;
  const auto r = env.step(zero_action());
  const WorldState& after = env.state();
  EXPECT_EQ(after.gripper.world_position, before.gripper.world_position);
  EXPECT_EQ(after.gripper.commanded_position, before.gripper.commanded_position);
  EXPECT_EQ(after.gripper.yaw, before.gripper.yaw);
  EXPECT_EQ(after.gripper.aperture, before.gripper.aperture);
  EXPECT_EQ(after.cube.position, before.cube.position);
  EXPECT_EQ(r.info.dist, dist0);
}

TEST(Sim, StepProtocol) {
  Environment env(EnvConfig{});
  EXPECT_THROW(env.step(zero_action()), wg::ProtocolError);
  env.reset(1, wg::wave::calm());
  for (int i = 0; i < 99; ++i) EXPECT_FALSE(env.step(zero_action()).truncated);
  const auto last = env.step(zero_action());
  EXPECT_TRUE(last.truncated);
  EXPECT_FALSE(last.terminated);
  EXPECT_THROW(env.step(zero_action()), wg::ProtocolError);
}

TEST(Sim, InvalidConfigNamesField) {
  EnvConfig cfg;
  cfg.cube_side = -1;
  try {
    Environment env(cfg);
    FAIL() << "expected ConfigError";
  } catch (const wg::ConfigError& e) {
    EXPECT_EQ(e.field(), "env.cube_side");
  }
  cfg = {};
  cfg.lift_partial = 0.3;
  EXPECT_THROW(Environment{cfg}, wg::ConfigError);
  cfg = {};
  cfg.spawn_hi = {0.9, 0.1};
  EXPECT_THROW(Environment{cfg}, wg::ConfigError);
}

TEST(Sim, ContactCheckExamples) {
  const ContactTolerances tol;
  CubeState cube;
  cube.position = {0.05, -0.02, 0.025};
  cube.yaw = 0.3;
  GripperState g;
  g.world_position = cube.position;
  g.yaw = 0.3;
  g.aperture = cube.side;
  EXPECT_TRUE(contact_check(g, cube, tol));

  GripperState far = g;
  far.world_position.x() += 0.10;
  EXPECT_FALSE(contact_check(far, cube, tol));

  GripperState quarter = g;
  quarter.yaw = 0.3 + kPi / 2;
  EXPECT_TRUE(contact_check(quarter, cube, tol));

  GripperState skew = g;
  skew.yaw = 0.3 + kPi / 4;
  EXPECT_FALSE(contact_check(skew, cube, tol));

  GripperState wide = g;
  wide.aperture = cube.side + 0.006;
  EXPECT_FALSE(contact_check(wide, cube, tol));
  wide.aperture = cube.side + 0.004;
  EXPECT_TRUE(contact_check(wide, cube, tol));
  wide.aperture = 0.0;  // closed past the faces still counts
  EXPECT_TRUE(contact_check(wide, cube, tol));

  GripperState high = g;
  high.world_position.z() += 0.03;
  EXPECT_FALSE(contact_check(high, cube, tol));
}

TEST(Sim, ObservationSlots) {
  WorldState s;
  s.gripper.world_position = {0, 0, 0.35};
  s.gripper.aperture = 0.10;
  s.gripper.yaw = 0.2;
  s.cube.position = {0, 0, 0.025};
  s.cube.yaw = -0.4;
  const auto o = build_observation(s, EnvConfig{});
  EXPECT_NEAR(o.dist, 0.325, 1e-15);
  EXPECT_EQ(o.g_state, 1.0);
  const auto f = o.flatten();
  EXPECT_EQ(f[2], 0.025);
  EXPECT_EQ(f[5], 0.35);
  EXPECT_EQ(f[6], o.dist);
  EXPECT_EQ(f[8], 0.2);
  EXPECT_EQ(f[9], -0.4);
}

TEST(Sim, StackOrdering) {
  std::vector<Observation> hist(1);
  hist[0].dist = 1;
  auto st = stack_observations(hist);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(st.slot(a)[6], 1.0);

  for (int k = 2; k <= 4; ++k) {
    Observation o;
    o.dist = k;
    hist.push_back(o);
  }
  st = stack_observations(hist);
  EXPECT_EQ(st.slot(0)[6], 4.0);
  EXPECT_EQ(st.slot(1)[6], 3.0);
  EXPECT_EQ(st.slot(2)[6], 2.0);
  EXPECT_THROW(stack_observations(std::vector<Observation>{}), wg::ProtocolError);

  Environment env(EnvConfig{});
  const auto s0 = env.reset(9, wg::wave::preset(1));
  const auto s1 = env.step(ActionCommand(1, 0, 0, 0, 1)).observation;
  EXPECT_TRUE(std::equal(s0.slot(0).begin(), s0.slot(0).end(), s1.slot(1).begin()));
  EXPECT_TRUE(std::equal(s0.slot(0).begin(), s0.slot(0).end(), s1.slot(2).begin()));
  const auto s2 = env.step(ActionCommand(1, 0, 0, 0, 1)).observation;
  const auto s3 = env.step(ActionCommand(1, 0, 0, 0, 1)).observation;
  EXPECT_TRUE(std::equal(s3.slot(1).begin(), s3.slot(1).end(), s2.slot(0).begin()));
  EXPECT_TRUE(std::equal(s3.slot(2).begin(), s3.slot(2).end(), s1.slot(0).begin()));
}

TEST(Sim, StepInfoJson) {
  Environment env(EnvConfig{});
  env.reset(1, wg::wave::preset(1));
  const nlohmann::json j = env.step(zero_action()).info;
  for (const char* k : {"dist", "contact", "attached", "cube_z", "wave_offset"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["wave_offset"].size(), 3u);
}

TEST(Sim, GraspLiftSucceeds) {
  Environment env = env_at_cube();
  grasp(env);
  EXPECT_EQ(env.state().gripper.aperture, env.config().cube_side);
  StepResult r;
  while (env.active()) r = env.step(ActionCommand(0, 0, 1, 0, -1));
  EXPECT_TRUE(r.terminated);
  EXPECT_FALSE(r.truncated);
  EXPECT_TRUE(r.info.success);
  EXPECT_GE(r.info.cube_z, 0.20);
  EXPECT_EQ(r.breakdown.grasp, 0.5);
  EXPECT_EQ(r.breakdown.lift, 2.0);
  EXPECT_EQ(r.breakdown.success, 5.0);
}

TEST(Sim, SuccessDoesNotTerminateWhenDisabled) {
  EnvConfig cfg;
  cfg.terminate_on_success = false;
  Environment env = env_at_cube(cfg);
  grasp(env);
  int successes = 0;
  while (env.active()) {
    const auto r = env.step(ActionCommand(0, 0, 1, 0, -1));
    EXPECT_FALSE(r.terminated);
    successes += r.info.success;
  }
  EXPECT_GT(successes, 0);
}

TEST(Sim, ClosingMissesUnalignedCube) {
  EnvConfig cfg;
  Environment env(cfg);
  env.reset(3, wg::wave::calm());
  WorldState s = env.state();
  s.gripper.commanded_position = s.cube.position + Eigen::Vector3d(0.05, 0, 0);
  s.gripper.world_position = s.gripper.commanded_position;
  env.restore(s);
  for (int i = 0; i < 4; ++i) env.step(ActionCommand(0, 0, 0, 0, -1));
  EXPECT_FALSE(env.state().cube.attached);
  EXPECT_EQ(env.state().gripper.aperture, 0.0);
}

// Fingers closed before the gripper lines up still grasp once it does.
TEST(Sim, ClosedGripperGraspsWhenAligned) {
  EnvConfig cfg;
  Environment env(cfg);
  env.reset(3, wg::wave::calm());
  WorldState s = env.state();
  s.gripper.commanded_position = s.cube.position + Eigen::Vector3d(0.05, 0, 0);
  s.gripper.world_position = s.gripper.commanded_position;
  s.gripper.yaw = s.cube.yaw;
  env.restore(s);
  for (int i = 0; i < 4; ++i) env.step(ActionCommand(0, 0, 0, 0, -1));
  ASSERT_EQ(env.state().gripper.aperture, 0.0);
  const auto r = env.step(ActionCommand(-1, 0, 0, 0, -1));
  EXPECT_TRUE(env.state().cube.attached);
  EXPECT_TRUE(r.info.contact);
  EXPECT_EQ(env.state().gripper.aperture, cfg.cube_side);
}

TEST(SimProperty, DeterministicReplay) {
  for (int k = 0; k < 20; ++k) {
    EXPECT_EQ(rollout(100 + k, k % 3, 500 + k), rollout(100 + k, k % 3, 500 + k));
  }
  EXPECT_NE(rollout(1, 1, 2), rollout(1, 1, 3));
}

TEST(SimProperty, WorkspaceSafety) {
  const EnvConfig cfg;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> wild(-1e6, 1e6);
  std::uniform_int_distribution<int> sea(0, 2);
  Environment env(cfg);
  for (int ep = 0; ep < 50; ++ep) {
    env.reset(ep, wg::wave::preset(sea(rng)));
    while (env.active()) {
      env.step(ActionCommand(wild(rng), wild(rng), wild(rng), wild(rng), wild(rng)));
      const auto& p = env.state().gripper.commanded_position;
      for (int i = 0; i < 3; ++i) {
        ASSERT_GE(p[i], cfg.workspace_lo[i]);
        ASSERT_LE(p[i], cfg.workspace_hi[i]);
      }
      ASSERT_GE(env.state().gripper.yaw, -kPi);
      ASSERT_LT(env.state().gripper.yaw, kPi);
    }
  }
}

TEST(SimProperty, AttachedCubeIsRigid) {
  for (int sea : {0, 1}) {
    Environment env = env_at_cube({}, sea);
    grasp(env);
    std::mt19937_64 rng(sea);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto rel = [&] {
      const auto& s = env.state();
      const Eigen::Vector3d d = s.cube.position - s.gripper.world_position;
      const double c = std::cos(-s.gripper.yaw), sn = std::sin(-s.gripper.yaw);
      return Eigen::Vector4d(c * d.x() - sn * d.y(), sn * d.x() + c * d.y(), d.z(),
                             wg::reward::wrap_angle(s.cube.yaw - s.gripper.yaw));
    };
    const Eigen::Vector4d ref = rel();
    for (int i = 0; i < 60 && env.active(); ++i) {
      env.step(ActionCommand(u(rng), u(rng), 0.3 * u(rng), u(rng), -1));
      ASSERT_TRUE(env.state().cube.attached);
      EXPECT_LT((rel() - ref).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SimProperty, OpeningReleasesAndDropsCube) {
  Environment env = env_at_cube();
  grasp(env);
  for (int i = 0; i < 3; ++i) env.step(ActionCommand(0, 0, 1, 0, -1));
  ASSERT_TRUE(env.state().cube.attached);
  ASSERT_GT(env.state().cube.position.z(), 0.1);
  const auto r = env.step(ActionCommand(0, 0, 0, 0, 1));
  EXPECT_GT(env.state().gripper.aperture, env.config().cube_side + kApertureSlack);
  EXPECT_FALSE(r.info.attached);
  EXPECT_EQ(env.state().cube.position.z(), env.config().cube_side / 2);
}

TEST(SimProperty, RestingAndStepContract) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Environment env(EnvConfig{});
  for (int ep = 0; ep < 60; ++ep) {
    env.reset(1000 + ep, wg::wave::preset(ep % 3));
    while (env.active()) {
      const auto r = env.step(ActionCommand(u(rng), u(rng), u(rng), u(rng), u(rng)));
      const auto& s = env.state();
      if (!s.cube.attached) {
        ASSERT_EQ(s.cube.position.z(), s.cube.side / 2);
      }
      ASSERT_FALSE(r.terminated && r.truncated);
      const auto& b = r.breakdown;
      ASSERT_NEAR(r.reward, b.reach_pos + b.reach_ori + b.grasp + b.lift + b.success, 1e-12);
      ASSERT_NEAR(r.info.dist, (s.cube.position - s.gripper.world_position).norm(), 1e-12);
      ASSERT_EQ(r.info.cube_z, s.cube.position.z());
      ASSERT_LE(r.reward, 9.5);
      ASSERT_GT(r.reward, 0.0);
    }
  }
}
