#include "wavegrasp/reward.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

namespace wavegrasp::reward {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  // fmod can land exactly on +pi after the shift through rounding.
  if (w >= std::numbers::pi) w -= two_pi;
  return w;
}

double angle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

double reach_position(double dist) { return 1.0 - std::tanh(kPositionScale * dist); }

double reach_orientation(double psi_cube, double psi_gripper) {
  return 1.0 - std::tanh(angle_distance(psi_cube, psi_gripper));
}

RewardBreakdown step_reward(const RewardInputs& in) {
  RewardBreakdown r;
  r.reach_pos = reach_position(in.dist);
  r.reach_ori = reach_orientation(in.psi_cube, in.psi_gripper);
  r.grasp = in.contact ? kGraspBonus : 0.0;
  r.lift = (in.contact && in.cube_z >= in.cube_side / 2.0 + in.lift_partial) ? kLiftBonus : 0.0;
  r.success = (in.attached && in.cube_z >= in.lift_success) ? kSuccessBonus : 0.0;
  r.total = r.reach_pos + r.reach_ori + r.grasp + r.lift + r.success;
  return r;
}

void to_json(nlohmann::json& j, const RewardBreakdown& r) {
  j = nlohmann::json{{"reach_pos", r.reach_pos}, {"reach_ori", r.reach_ori}, {"grasp", r.grasp},
                     {"lift", r.lift},           {"success", r.success},     {"total", r.total}};
}

}  // namespace wavegrasp::reward
