#include "wavegrasp/wave.hpp"

#include <cmath>
#include <string>

#include "wavegrasp/errors.hpp"

namespace wavegrasp::wave {

void validate(const SeaStateSpec& spec) {
  if (!(spec.period > 0.0) || !std::isfinite(spec.period)) {
    throw ConfigError("sea_state.period", "must be > 0, got " + std::to_string(spec.period));
  }
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw ConfigError("sea_state.amplitude", "must be finite and >= 0");
  }
  const double a = spec.amplitude;
  switch (spec.wmo_code) {
    case 0:
      if (a != 0.0) throw ConfigError("sea_state.amplitude", "WMO code 0 requires amplitude 0");
      break;
    case 1:
      if (!(a > 0.0 && a <= 0.1)) {
        throw ConfigError("sea_state.amplitude", "WMO code 1 requires amplitude in (0, 0.1]");
      }
      break;
    case 2:
      if (!(a > 0.1 && a <= 0.5)) {
        throw ConfigError("sea_state.amplitude", "WMO code 2 requires amplitude in (0.1, 0.5]");
      }
      break;
    default:
      throw ConfigError("sea_state.wmo_code", "unknown WMO code " + std::to_string(spec.wmo_code));
  }
  if (!std::isfinite(spec.surge_frac) || !std::isfinite(spec.sway_frac)) {
    throw ConfigError("sea_state.surge_frac", "must be finite");
  }
}

Eigen::Vector3d wave_offset(const SeaStateSpec& spec, double t) {
  if (spec.wmo_code == 0 || spec.amplitude == 0.0) return Eigen::Vector3d::Zero();
  const double omega_t = 2.0 * std::numbers::pi * t / spec.period;
  const double a = spec.amplitude;
  return {spec.surge_frac * a * std::sin(omega_t + spec.phases[1]),
          spec.sway_frac * a * std::sin(omega_t + spec.phases[2]),
          a * std::sin(omega_t + spec.phases[0])};
}

SeaStateSpec preset(int wmo_code) {
  SeaStateSpec spec;
  spec.wmo_code = wmo_code;
  switch (wmo_code) {
    case 0:
      spec.amplitude = 0.0;
      break;
    case 1:
      spec.amplitude = 0.1;
      break;
    case 2:
      spec.amplitude = 0.5;
      break;
    default:
      throw ConfigError("sea_state.wmo_code", "unknown WMO code " + std::to_string(wmo_code));
  }
  spec.period = 5.0;
  return spec;
}

}  // namespace wavegrasp::wave
