#include "wavegrasp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <string>

#include "wavegrasp/errors.hpp"

namespace wavegrasp::sim {

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(field, "must be finite and > 0, got " + std::to_string(v));
  }
}

Eigen::Matrix2d yaw_rotation(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

double move_toward(double from, double to, double max_delta) {
  if (to > from) return std::min(to, from + max_delta);
  return std::max(to, from - max_delta);
}

bool aligned_for_grasp(const GripperState& g, const CubeState& c, const ContactTolerances& tol) {
  const double horizontal = std::hypot(g.world_position.x() - c.position.x(),
                                       g.world_position.y() - c.position.y());
  if (horizontal > tol.xy) return false;
  if (std::abs(g.world_position.z() - (c.position.z() + tol.grasp_height_offset)) > tol.z) return false;
  constexpr double quarter = std::numbers::pi / 2.0;
  const double m = std::fmod(reward::angle_distance(g.yaw, c.yaw), quarter);
  return std::min(m, quarter - m) <= tol.yaw;
}

}  // namespace

void validate(const EnvConfig& cfg) {
  require_positive(cfg.beta_pos, "env.beta_pos");
  require_positive(cfg.beta_yaw, "env.beta_yaw");
  require_positive(cfg.dt, "env.dt");
  require_positive(cfg.cube_side, "env.cube_side");
  require_positive(cfg.w_max, "env.w_max");
  require_positive(cfg.aperture_speed, "env.aperture_speed");
  require_positive(cfg.lift_partial, "env.lift_partial");
  require_positive(cfg.lift_success, "env.lift_success");
  require_positive(cfg.tol_xy, "env.tol_xy");
  require_positive(cfg.tol_z, "env.tol_z");
  require_positive(cfg.tol_yaw, "env.tol_yaw");
  if (cfg.w_max <= cfg.cube_side) throw ConfigError("env.w_max", "must exceed cube_side");
  if (cfg.episode_len_train <= 0) throw ConfigError("env.episode_len_train", "must be > 0");
  if (cfg.lift_partial >= cfg.lift_success) {
    throw ConfigError("env.lift_partial", "must be below lift_success");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(cfg.workspace_lo[i] < cfg.workspace_hi[i])) {
      throw ConfigError("env.workspace", "lower corner must be below upper corner on every axis");
    }
  }
  for (int i = 0; i < 2; ++i) {
    if (!(cfg.spawn_lo[i] <= cfg.spawn_hi[i])) {
      throw ConfigError("env.spawn", "lower corner must not exceed upper corner");
    }
    if (cfg.spawn_lo[i] < cfg.workspace_lo[i] || cfg.spawn_hi[i] > cfg.workspace_hi[i]) {
      throw ConfigError("env.spawn", "spawn region must lie inside the workspace footprint");
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (cfg.home[i] < cfg.workspace_lo[i] || cfg.home[i] > cfg.workspace_hi[i]) {
      throw ConfigError("env.home", "home pose must lie inside the workspace");
    }
  }
}

ContactTolerances tolerances(const EnvConfig& cfg) {
  return {cfg.tol_xy, cfg.tol_z, cfg.tol_yaw, cfg.grasp_height_offset};
}

ActionCommand::ActionCommand(double dx, double dy, double dz, double dyaw, double g_state)
    : ActionCommand(std::array<double, kActionDim>{dx, dy, dz, dyaw, g_state}) {}

ActionCommand::ActionCommand(std::span<const double> values) {
  if (values.size() != kActionDim) {
    throw InputError("action must have " + std::to_string(kActionDim) + " components");
  }
  for (int i = 0; i < kActionDim; ++i) {
    if (std::isnan(values[i])) throw InputError("action component is NaN");
    v_[i] = std::clamp(values[i], -1.0, 1.0);
  }
}

std::array<double, kObsDim> Observation::flatten() const {
  return {p_cube.x(), p_cube.y(), p_cube.z(), p_g.x(), p_g.y(), p_g.z(),
          dist,       g_state,    psi_g,      psi_cube};
}

void to_json(nlohmann::json& j, const StepInfo& info) {
  j = nlohmann::json{{"dist", info.dist},
                     {"contact", info.contact},
                     {"attached", info.attached},
                     {"cube_z", info.cube_z},
                     {"wave_offset", {info.wave_offset.x(), info.wave_offset.y(), info.wave_offset.z()}},
                     {"success", info.success}};
}

bool contact_check(const GripperState& gripper, const CubeState& cube, const ContactTolerances& tol) {
  if (gripper.aperture > cube.side + kApertureSlack) return false;
  return aligned_for_grasp(gripper, cube, tol);
}

Observation build_observation(const WorldState& state, const EnvConfig& cfg) {
  Observation o;
  o.p_cube = state.cube.position;
  o.p_g = state.gripper.world_position;
  o.dist = (o.p_cube - o.p_g).norm();
  o.g_state = 2.0 * state.gripper.aperture / cfg.w_max - 1.0;
  o.psi_g = state.gripper.yaw;
  o.psi_cube = state.cube.yaw;
  return o;
}

StackedObservation stack_observations(std::span<const Observation> history) {
  if (history.empty()) throw ProtocolError("stack_observations: empty history");
  StackedObservation out;
  const int n = static_cast<int>(history.size());
  for (int age = 0; age < kStackDepth; ++age) {
    const int idx = std::max(0, n - 1 - age);
    const auto flat = history[idx].flatten();
    std::copy(flat.begin(), flat.end(), out.values.begin() + age * kObsDim);
  }
  return out;
}

Environment::Environment(EnvConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  step_limit_ = cfg_.episode_len_train;
}

void Environment::set_step_limit(int steps) {
  if (steps <= 0) throw ConfigError("step_limit", "must be > 0");
  step_limit_ = steps;
}

StackedObservation Environment::reset(std::uint64_t seed, const wave::SeaStateSpec& sea_state) {
  wave::validate(sea_state);
  sea_ = sea_state;

  Rng rng(seed);
  std::uniform_real_distribution<double> ux(cfg_.spawn_lo.x(), cfg_.spawn_hi.x());
  std::uniform_real_distribution<double> uy(cfg_.spawn_lo.y(), cfg_.spawn_hi.y());
  std::uniform_real_distribution<double> uyaw(-std::numbers::pi, std::numbers::pi);
  // Draw order is fixed: x, y, yaw.
  const double cx = ux(rng);
  const double cy = uy(rng);
  const double cyaw = uyaw(rng);

  state_ = WorldState{};
  state_.cube.side = cfg_.cube_side;
  state_.cube.position = {cx, cy, cfg_.cube_side / 2.0};
  state_.cube.yaw = cyaw;
  state_.cube.attached = false;

  state_.gripper.commanded_position = cfg_.home;
  state_.gripper.yaw = 0.0;
  state_.gripper.aperture = cfg_.w_max;
  state_.gripper.target_aperture = cfg_.w_max;
  state_.wave_offset = wave::wave_offset(sea_, 0.0);
  state_.gripper.world_position = cfg_.home + state_.wave_offset;

  history_.clear();
  active_ = true;
  return push_observation();
}

StackedObservation Environment::restore(const WorldState& state) {
  if (!active_) throw ProtocolError("restore needs a running episode; call reset() first");
  state_ = state;
  history_.clear();
  return push_observation();
}

StepResult Environment::step(const ActionCommand& action) {
  if (!active_) throw ProtocolError("step called on a finished or unstarted episode; call reset()");

  GripperState& g = state_.gripper;
  CubeState& cube = state_.cube;

  g.commanded_position.x() += action.dx() * cfg_.beta_pos;
  g.commanded_position.y() += action.dy() * cfg_.beta_pos;
  g.commanded_position.z() += action.dz() * cfg_.beta_pos;
  g.commanded_position = g.commanded_position.cwiseMax(cfg_.workspace_lo).cwiseMin(cfg_.workspace_hi);
  g.yaw = reward::wrap_angle(g.yaw + action.dyaw() * cfg_.beta_yaw);
  g.target_aperture = cfg_.w_max * (action.g_state() + 1.0) / 2.0;

  state_.step += 1;
  state_.time = state_.step * cfg_.dt;
  state_.wave_offset = wave::wave_offset(sea_, state_.time);
  g.world_position = g.commanded_position + state_.wave_offset;

  const ContactTolerances tol = tolerances(cfg_);
  const double release_width = cube.side + kApertureSlack;
  if (cube.attached) {
    if (g.target_aperture > release_width) {
      g.aperture = move_toward(g.aperture, g.target_aperture, cfg_.aperture_speed);
      if (g.aperture > release_width) {
        cube.attached = false;
        cube.position.z() = cube.side / 2.0;
      }
    } else {
      g.aperture = cube.side;
    }
  } else {
    const double previous = g.aperture;
    double next = move_toward(previous, g.target_aperture, cfg_.aperture_speed);
    // Fingers closing around an aligned cube stop at its faces.
    if (previous >= cube.side && next < cube.side && aligned_for_grasp(g, cube, tol)) {
      next = cube.side;
    }
    g.aperture = next;
  }

  if (cube.attached) {
    update_attached_cube();
  } else if (contact_check(g, cube, tol) && g.target_aperture <= cube.side) {
    cube.attached = true;
    g.aperture = cube.side;
    const Eigen::Vector3d rel = cube.position - g.world_position;
    const Eigen::Vector2d local_xy = yaw_rotation(-g.yaw) * rel.head<2>();
    state_.grasp_local_offset = {local_xy.x(), local_xy.y(), rel.z()};
    state_.grasp_local_yaw = reward::wrap_angle(cube.yaw - g.yaw);
  }

  // A held cube is in contact by definition; the geometric test is only
  // needed before the grasp closes.
  const bool contact = cube.attached || contact_check(g, cube, tol);
  const bool success = cube.attached && cube.position.z() >= cfg_.lift_success;

  StepResult result;
  result.observation = push_observation();
  const Observation& now = history_.back();
  reward::RewardInputs in;
  in.dist = now.dist;
  in.psi_cube = cube.yaw;
  in.psi_gripper = g.yaw;
  in.contact = contact;
  in.attached = cube.attached;
  in.cube_z = cube.position.z();
  in.cube_side = cube.side;
  in.lift_partial = cfg_.lift_partial;
  in.lift_success = cfg_.lift_success;
  result.breakdown = reward::step_reward(in);
  result.reward = result.breakdown.total;
  result.terminated = success && cfg_.terminate_on_success;
  result.truncated = !result.terminated && state_.step >= step_limit_;
  result.info = {now.dist, contact, cube.attached, cube.position.z(), state_.wave_offset, success};
  if (result.terminated || result.truncated) active_ = false;
  return result;
}

void Environment::update_attached_cube() {
  const GripperState& g = state_.gripper;
  CubeState& cube = state_.cube;
  const Eigen::Vector2d xy = yaw_rotation(g.yaw) * state_.grasp_local_offset.head<2>();
  cube.position = g.world_position + Eigen::Vector3d(xy.x(), xy.y(), state_.grasp_local_offset.z());
  cube.yaw = reward::wrap_angle(g.yaw + state_.grasp_local_yaw);
}

StackedObservation Environment::push_observation() {
  history_.push_back(build_observation(state_, cfg_));
  while (static_cast<int>(history_.size()) > kStackDepth) history_.pop_front();
  std::array<Observation, kStackDepth> buf;
  const int n = static_cast<int>(history_.size());
  std::copy(history_.begin(), history_.end(), buf.begin());
  return stack_observations(std::span<const Observation>(buf.data(), n));
}

}  // namespace wavegrasp::sim
