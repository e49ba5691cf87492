#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "wavegrasp/errors.hpp"
#include "wavegrasp/wave.hpp"

namespace wg = wavegrasp;
using wg::wave::SeaStateSpec;

TEST(Wave, CalmIsZeroEverywhere) {
  const auto calm = wg::wave::calm();
  for (double t : {0.0, 0.1, 1.7, 123.4, 1e6}) {
    EXPECT_EQ(wg::wave::wave_offset(calm, t), Eigen::Vector3d::Zero()) << "t=" << t;
  }
}

TEST(Wave, HeavePeaksAtQuarterPeriod) {
  SeaStateSpec s;
  s.wmo_code = 2;
  s.amplitude = 0.5;
  s.period = 5.0;
  const auto off = wg::wave::wave_offset(s, 1.25);
  EXPECT_NEAR(off.z(), 0.5, 1e-12);
}

TEST(Wave, SurgeAndSwayAreScaledPhaseShiftedCopies) {
  const auto s = wg::wave::preset(1);
  const double w = 2.0 * std::numbers::pi / s.period;
  for (double t : {0.0, 0.7, 2.3, 4.9}) {
    const auto off = wg::wave::wave_offset(s, t);
    EXPECT_NEAR(off.x(), 0.4 * 0.1 * std::sin(w * t + std::numbers::pi / 3), 1e-15);
    EXPECT_NEAR(off.y(), 0.4 * 0.1 * std::sin(w * t + 2 * std::numbers::pi / 3), 1e-15);
  }
}

TEST(Wave, Presets) {
  EXPECT_EQ(wg::wave::preset(0).amplitude, 0.0);
  EXPECT_EQ(wg::wave::preset(1).amplitude, 0.1);
  EXPECT_EQ(wg::wave::preset(1).period, 5.0);
  EXPECT_EQ(wg::wave::preset(2).amplitude, 0.5);
  EXPECT_EQ(wg::wave::preset(2).period, 5.0);
  EXPECT_THROW(wg::wave::preset(3), wg::ConfigError);
  EXPECT_THROW(wg::wave::preset(-1), wg::ConfigError);
}

TEST(Wave, AmplitudeMustMatchCodeBand) {
  SeaStateSpec s;
  s.wmo_code = 1;
  s.amplitude = 0.2;
  EXPECT_THROW(wg::wave::validate(s), wg::ConfigError);
  s.wmo_code = 0;
  s.amplitude = 0.01;
  EXPECT_THROW(wg::wave::validate(s), wg::ConfigError);
  s.wmo_code = 2;
  s.amplitude = 0.3;
  EXPECT_NO_THROW(wg::wave::validate(s));
  s.period = 0.0;
  EXPECT_THROW(wg::wave::validate(s), wg::ConfigError);
}

// Scan the heave signal at the simulation step and measure amplitude and the
// mean spacing of upward zero crossings.
TEST(Wave, ScannedAmplitudeAndPeriod) {
  for (int code : {1, 2}) {
    const auto s = wg::wave::preset(code);
    const double dt = 0.1;
    double peak = 0.0;
    std::vector<double> ups;
    double prev = wg::wave::wave_offset(s, 0.0).z();
    for (int i = 1; i <= 1000; ++i) {
      const double t = i * dt;
      const double z = wg::wave::wave_offset(s, t).z();
      peak = std::max(peak, std::abs(z));
      if (prev < 0.0 && z >= 0.0) ups.push_back(t);
      prev = z;
    }
    ASSERT_GE(ups.size(), 3u);
    const double period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
    EXPECT_NEAR(peak, s.amplitude, 1e-3) << "code " << code;
    EXPECT_NEAR(period, 5.0, dt) << "code " << code;
  }
}

TEST(WaveProperty, PeriodicBoundedZeroMean) {
  for (int code : {1, 2}) {
    const auto s = wg::wave::preset(code);
    for (int i = 0; i < 500; ++i) {
      const double t = 0.0377 * i;
      const auto a = wg::wave::wave_offset(s, t);
      const auto b = wg::wave::wave_offset(s, t + s.period);
      EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LE(std::abs(a.z()), s.amplitude + 1e-15);
      EXPECT_LE(std::abs(a.x()), s.surge_frac * s.amplitude + 1e-15);
      EXPECT_LE(std::abs(a.y()), s.sway_frac * s.amplitude + 1e-15);
    }
    // Uniform samples over one period average to zero.
    const int n = 1000;
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) sum += wg::wave::wave_offset(s, s.period * i / n);
    EXPECT_LT((sum / n).cwiseAbs().maxCoeff(), 1e-6 * s.amplitude);
  }
}
