#ifndef WAVEGRASP_WAVE_HPP_
#define WAVEGRASP_WAVE_HPP_

#include <Eigen/Core>
#include <array>
#include <numbers>

namespace wavegrasp::wave {

// Sea state in WMO coding with the parameters of a multi-axis sinusoidal
// base motion. Heave uses the full amplitude; surge and sway are attenuated
// copies with their own phase.
struct SeaStateSpec {
  int wmo_code = 0;
  double amplitude = 0.0;  // m
  double period = 5.0;     // s
  double surge_frac = 0.4;
  double sway_frac = 0.4;
  // {heave, surge, sway} phase offsets in radians.
  std::array<double, 3> phases{0.0, std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0};
};

// Throws ConfigError when the amplitude lies outside the band of its WMO
// code (0 -> 0, 1 -> (0, 0.1], 2 -> (0.1, 0.5]) or the period is not positive.
void validate(const SeaStateSpec& spec);

// Base offset (surge x, sway y, heave z) in meters at time t >= 0 seconds.
Eigen::Vector3d wave_offset(const SeaStateSpec& spec, double t);

// Test presets: 0 calm, 1 at A = 0.1 m, 2 at A = 0.5 m; both waves use T = 5 s.
SeaStateSpec preset(int wmo_code);

inline SeaStateSpec calm() { return preset(0); }

}  // namespace wavegrasp::wave

#endif  // WAVEGRASP_WAVE_HPP_
