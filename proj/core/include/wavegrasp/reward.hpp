#ifndef WAVEGRASP_REWARD_HPP_
#define WAVEGRASP_REWARD_HPP_

#include <nlohmann/json_fwd.hpp>

namespace wavegrasp::reward {

inline constexpr double kPositionScale = 1.66;
inline constexpr double kGraspBonus = 0.5;
inline constexpr double kLiftBonus = 2.0;
inline constexpr double kSuccessBonus = 5.0;
inline constexpr double kMaxStepReward = 1.0 + 1.0 + kGraspBonus + kLiftBonus + kSuccessBonus;

struct RewardBreakdown {
  double reach_pos = 0.0;
  double reach_ori = 0.0;
  double grasp = 0.0;
  double lift = 0.0;
  double success = 0.0;
  double total = 0.0;
};

// Inputs of the per-step reward, all measured on the post-step state.
struct RewardInputs {
  double dist = 0.0;        // gripper to cube center, m
  double psi_cube = 0.0;    // rad
  double psi_gripper = 0.0; // rad
  bool contact = false;
  bool attached = false;
  double cube_z = 0.0;      // cube center height, m
  double cube_side = 0.05;  // m
  double lift_partial = 0.01;
  double lift_success = 0.20;
};

// Wrap an angle into [-pi, pi).
double wrap_angle(double a);

// |wrap(a - b)| in [0, pi].
double angle_distance(double a, double b);

// 1 - tanh(1.66 d).
double reach_position(double dist);

// 1 - tanh|psi_cube - psi_g|, on the wrapped difference.
double reach_orientation(double psi_cube, double psi_gripper);

RewardBreakdown step_reward(const RewardInputs& in);

void to_json(nlohmann::json& j, const RewardBreakdown& r);

}  // namespace wavegrasp::reward

#endif  // WAVEGRASP_REWARD_HPP_
