#include "wavegrasp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wavegrasp/checkpoint.hpp"
#include "wavegrasp/eval.hpp"
#include "wavegrasp/mlp.hpp"
#include "wavegrasp/reward.hpp"
#include "wavegrasp/sim.hpp"
#include "wavegrasp/wave.hpp"

namespace wavegrasp::diagnostics {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult gradient_check(bool inject_fault) {
  Rng rng(7);
  std::uniform_int_distribution<int> width(1, 6);
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> widths{width(rng), width(rng), width(rng), width(rng)};
    nn::Mlp net = nn::Mlp::random(widths, rng);
    nn::Matrix x(widths.front(), 1);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, 0) = normal(rng);
    nn::Matrix w(widths.back(), 1);
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, 0) = normal(rng);

    // Scalar objective L = w . f(x).
    nn::ForwardCache cache;
    net.forward(x, &cache);
    nn::Gradients g;
    net.backward(cache, w, &g, true);
    if (inject_fault) g.layers[0].weight.array() += 0.1;

    for (std::size_t l = 0; l < net.layer_count(); ++l) {
      auto& weight = net.layers()[l].weight;
      for (Eigen::Index i = 0; i < weight.size(); ++i) {
        const double saved = weight.data()[i];
        weight.data()[i] = saved + h;
        const double fp = w.col(0).dot(net.forward(x, nullptr).col(0));
        weight.data()[i] = saved - h;
        const double fm = w.col(0).dot(net.forward(x, nullptr).col(0));
        weight.data()[i] = saved;
        const double numeric = (fp - fm) / (2.0 * h);
        const double analytic = g.layers[l].weight.data()[i];
        const double err = std::abs(numeric - analytic) / std::max(1.0, std::abs(numeric) + std::abs(analytic));
        worst = std::max(worst, err);
      }
    }
  }
  return {"gradient_check", worst < 1e-5, "max_rel_err=" + fmt_double(worst)};
}

CheckResult reward_points() {
  const double at_zero = reward::reach_position(0.0);
  const double at_half = reward::reach_position(0.5);
  const double quarter_turn = reward::reach_orientation(std::numbers::pi / 4.0, 0.0);
  reward::RewardInputs ideal;
  ideal.contact = true;
  ideal.attached = true;
  ideal.cube_z = 0.25;
  const double max_total = reward::step_reward(ideal).total;
  const bool ok = at_zero == 1.0 && std::abs(at_half - 0.319524) < 1e-4 && std::abs(quarter_turn - 0.3442) < 1e-4 &&
                  max_total == 9.5;
  return {"reward_points", ok,
          "r(0.5)=" + fmt_double(at_half) + " r_ori(pi/4)=" + fmt_double(quarter_turn) +
              " max=" + fmt_double(max_total)};
}

CheckResult wave_periodicity() {
  double worst = 0.0;
  for (int code : {1, 2}) {
    const auto spec = wave::preset(code);
    for (int i = 0; i < 200; ++i) {
      const double t = 0.173 * i;
      worst = std::max(worst, (wave::wave_offset(spec, t) - wave::wave_offset(spec, t + spec.period)).cwiseAbs().maxCoeff());
    }
  }
  return {"wave_periodicity", worst < 1e-9, "max_residual=" + fmt_double(worst)};
}

CheckResult env_determinism() {
  auto rollout = [] {
    sim::Environment env(sim::EnvConfig{});
    Rng rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> trace;
    auto obs = env.reset(5, wave::preset(1));
    trace.insert(trace.end(), obs.values.begin(), obs.values.end());
    while (env.active()) {
      const auto r = env.step(sim::ActionCommand(u(rng), u(rng), u(rng), u(rng), u(rng)));
      trace.insert(trace.end(), r.observation.values.begin(), r.observation.values.end());
      trace.push_back(r.reward);
    }
    return trace;
  };
  const bool same = rollout() == rollout();
  return {"env_determinism", same, same ? "bitwise identical" : "trajectories differ"};
}

CheckResult checkpoint_roundtrip() {
  Rng rng(3);
  sac::SacConfig cfg;
  cfg.actor_hidden = {16, 16};
  cfg.critic_hidden = {16};
  sac::SacAgent agent(cfg, rng);
  const auto ckpt = PolicyCheckpoint::from_agent(agent, 1, 0, 0, false);
  const auto back = from_bytes(to_bytes(ckpt));
  eval::ActorPolicy a(ckpt.make_actor());
  eval::ActorPolicy b(back.make_actor());
  const auto ta = eval::run_trial(sim::EnvConfig{}, a, wave::preset(1), 9, 50);
  const auto tb = eval::run_trial(sim::EnvConfig{}, b, wave::preset(1), 9, 50);
  bool same = ta.rows.size() == tb.rows.size();
  for (std::size_t i = 0; same && i < ta.rows.size(); ++i) {
    same = ta.rows[i].dist == tb.rows[i].dist && ta.rows[i].reward == tb.rows[i].reward;
  }
  return {"checkpoint_roundtrip", same, same ? "identical traces" : "traces differ"};
}

}  // namespace

std::vector<CheckResult> run_all(const Options& opts) {
  return {gradient_check(opts.inject_gradient_fault), reward_points(), wave_periodicity(), env_determinism(),
          checkpoint_roundtrip()};
}

void print(const std::vector<CheckResult>& results, std::ostream& out) {
  for (const auto& r : results) out << (r.passed ? "PASS " : "FAIL ") << r.name << ' ' << r.detail << '\n';
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace wavegrasp::diagnostics
