#ifndef WAVEGRASP_SIM_HPP_
#define WAVEGRASP_SIM_HPP_

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <deque>
#include <nlohmann/json_fwd.hpp>
#include <span>

#include "wavegrasp/reward.hpp"
#include "wavegrasp/rng.hpp"
#include "wavegrasp/wave.hpp"

namespace wavegrasp::sim {

inline constexpr int kObsDim = 10;
inline constexpr int kStackDepth = 3;
inline constexpr int kStackedObsDim = kObsDim * kStackDepth;
inline constexpr int kActionDim = 5;

// Extra opening above the cube side for which both fingers still count as touching.
inline constexpr double kApertureSlack = 0.005;

struct EnvConfig {
  double beta_pos = 0.05;  // m per unit action per step
  double beta_yaw = 0.1;   // rad per unit action per step
  double dt = 0.1;         // s per step
  double cube_side = 0.05;
  double w_max = 0.10;  // fully open aperture
  double aperture_speed = 0.05;  // m per step
  Eigen::Vector3d workspace_lo{-0.5, -0.5, 0.02};
  Eigen::Vector3d workspace_hi{0.5, 0.5, 0.6};
  Eigen::Vector2d spawn_lo{-0.15, -0.15};
  Eigen::Vector2d spawn_hi{0.15, 0.15};
  Eigen::Vector3d home{0.0, 0.0, 0.35};
  int episode_len_train = 100;
  double lift_partial = 0.01;  // above resting height
  double lift_success = 0.20;  // absolute cube center height
  double tol_xy = 0.015;
  double tol_z = 0.02;
  double tol_yaw = 0.15;
  // Gripper center height above the cube center when grasping.
  double grasp_height_offset = 0.0;
  bool terminate_on_success = true;
  std::uint64_t rng_seed = kDefaultSeed;
};

// Throws ConfigError naming the first offending field.
void validate(const EnvConfig& cfg);

struct ContactTolerances {
  double xy = 0.015;
  double z = 0.02;
  double yaw = 0.15;
  double grasp_height_offset = 0.0;
};

ContactTolerances tolerances(const EnvConfig& cfg);

// Gripper pose. Roll is 0 and pitch points straight down; neither is stored.
struct GripperState {
  Eigen::Vector3d commanded_position = Eigen::Vector3d::Zero();
  Eigen::Vector3d world_position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double aperture = 0.0;
  double target_aperture = 0.0;
};

struct CubeState {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double side = 0.05;
  bool attached = false;
};

// Normalized command; every component is clamped to [-1, 1] on construction.
class ActionCommand {
 public:
  ActionCommand() = default;
  ActionCommand(double dx, double dy, double dz, double dyaw, double g_state);
  explicit ActionCommand(std::span<const double> values);

  double dx() const { return v_[0]; }
  double dy() const { return v_[1]; }
  double dz() const { return v_[2]; }
  double dyaw() const { return v_[3]; }
  double g_state() const { return v_[4]; }
  const std::array<double, kActionDim>& values() const { return v_; }

 private:
  std::array<double, kActionDim> v_{};
};

// Slot order: p_cube(x,y,z), p_g(x,y,z), dist, g_state, psi_g, psi_cube.
struct Observation {
  Eigen::Vector3d p_cube = Eigen::Vector3d::Zero();
  Eigen::Vector3d p_g = Eigen::Vector3d::Zero();
  double dist = 0.0;
  double g_state = 0.0;
  double psi_g = 0.0;
  double psi_cube = 0.0;

  std::array<double, kObsDim> flatten() const;
};

// [s_t, s_{t-1}, s_{t-2}], each 10 slots, newest first.
struct StackedObservation {
  std::array<double, kStackedObsDim> values{};

  std::span<const double, kObsDim> slot(int age) const {
    return std::span<const double, kObsDim>(values.data() + age * kObsDim, kObsDim);
  }
  bool operator==(const StackedObservation&) const = default;
};

struct WorldState {
  GripperState gripper;
  CubeState cube;
  int step = 0;
  double time = 0.0;
  Eigen::Vector3d wave_offset = Eigen::Vector3d::Zero();
  // Cube pose in the gripper frame, valid while attached.
  Eigen::Vector3d grasp_local_offset = Eigen::Vector3d::Zero();
  double grasp_local_yaw = 0.0;
};

struct StepInfo {
  double dist = 0.0;
  bool contact = false;
  bool attached = false;
  double cube_z = 0.0;
  Eigen::Vector3d wave_offset = Eigen::Vector3d::Zero();
  bool success = false;
};

struct StepResult {
  StackedObservation observation;
  double reward = 0.0;
  reward::RewardBreakdown breakdown;
  bool terminated = false;
  bool truncated = false;
  StepInfo info;
};

void to_json(nlohmann::json& j, const StepInfo& info);

// True iff both fingers touch the cube: centers within tol_xy horizontally,
// gripper height within tol_z of the grasp height, yaw aligned modulo pi/2,
// and aperture at most side + kApertureSlack. Fingers already closed past
// the side still count; attaching resets the aperture to the side.
bool contact_check(const GripperState& gripper, const CubeState& cube, const ContactTolerances& tol);

Observation build_observation(const WorldState& state, const EnvConfig& cfg);

// history is ordered oldest to newest and must be non-empty.
StackedObservation stack_observations(std::span<const Observation> history);

// Kinematic grasping environment. Not thread-safe; one instance per thread.
class Environment {
 public:
  explicit Environment(EnvConfig cfg);

  StackedObservation reset(std::uint64_t seed, const wave::SeaStateSpec& sea_state);
  StepResult step(const ActionCommand& action);

  // Replaces the world state of the current episode and restarts the
  // observation history from it. Used to set up specific scenarios.
  StackedObservation restore(const WorldState& state);

  // Overrides episode_len_train for subsequent episodes.
  void set_step_limit(int steps);
  int step_limit() const { return step_limit_; }

  bool active() const { return active_; }
  const WorldState& state() const { return state_; }
  const EnvConfig& config() const { return cfg_; }
  const wave::SeaStateSpec& sea_state() const { return sea_; }

 private:
  void update_attached_cube();
  StackedObservation push_observation();

  EnvConfig cfg_;
  wave::SeaStateSpec sea_;
  WorldState state_;
  std::deque<Observation> history_;
  int step_limit_ = 0;
  bool active_ = false;
};

}  // namespace wavegrasp::sim

#endif  // WAVEGRASP_SIM_HPP_
