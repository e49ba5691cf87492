#include "wavegrasp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numbers>

#include "wavegrasp/errors.hpp"
#include "wavegrasp/reward.hpp"

namespace wavegrasp::eval {

void validate(const EvalProtocol& p) {
  if (p.trials < 1) throw ConfigError("eval.trials", "must be >= 1");
  if (!(p.time_limit_s > 0.0)) throw ConfigError("eval.time_limit_s", "must be > 0");
  if (!(p.success_lift > 0.0)) throw ConfigError("eval.success_lift", "must be > 0");
  if (p.sea_states.empty()) throw ConfigError("eval.sea_states", "need at least one sea state");
  for (int s : p.sea_states) wave::preset(s);
}

int step_limit(const EvalProtocol& p, const sim::EnvConfig& env) {
  return std::max(1, static_cast<int>(std::lround(p.time_limit_s / env.dt)));
}

const StateResult& EvalReport::state(int wmo_code) const {
  for (const auto& s : states) {
    if (s.sea_state == wmo_code) return s;
  }
  throw InputError("no result for sea state " + std::to_string(wmo_code));
}

sim::ActionCommand ActorPolicy::act(const sim::StackedObservation& obs) {
  return actor_.act(obs, sac::ActionMode::kDeterministic, unused_rng_);
}

void ScriptedGraspPolicy::reset() { last_command_delta_.reset(); }

sim::ActionCommand ScriptedGraspPolicy::act(const sim::StackedObservation& obs) {
  const auto now = obs.slot(0);
  const auto prev = obs.slot(1);
  const Eigen::Vector3d p_cube(now[0], now[1], now[2]);
  const Eigen::Vector3d p_g(now[3], now[4], now[5]);
  const double aperture = (now[7] + 1.0) / 2.0 * cfg_.w_max;
  const double psi_g = now[8];
  const double psi_cube = now[9];

  // Base motion over the last step is the observed displacement minus what we commanded.
  Eigen::Vector3d wave_step = Eigen::Vector3d::Zero();
  if (last_command_delta_) {
    const Eigen::Vector3d p_prev(prev[3], prev[4], prev[5]);
    wave_step = (p_g - p_prev) - *last_command_delta_;
  }

  constexpr double quarter = std::numbers::pi / 2.0;
  double yaw_err = reward::wrap_angle(psi_cube - psi_g);
  yaw_err -= quarter * std::round(yaw_err / quarter);

  const Eigen::Vector3d grasp_point = p_cube + Eigen::Vector3d(0.0, 0.0, cfg_.grasp_height_offset);
  const double horizontal = (grasp_point - p_g).head<2>().norm();
  const bool holding = std::abs(aperture - cfg_.cube_side) < 1e-9 && (grasp_point - p_g).norm() < cfg_.tol_z;

  Eigen::Vector3d target = grasp_point;
  double grip = 1.0;
  if (holding) {
    target = p_g;
    target.z() = cfg_.lift_success + 0.1;
    grip = -1.0;
  } else if (horizontal > 0.5 * cfg_.tol_xy || std::abs(yaw_err) > 0.5 * cfg_.tol_yaw) {
    // Approach from above while aligning.
    target.z() = grasp_point.z() + (horizontal > 0.03 ? 0.08 : 0.03);
  } else if (std::abs(grasp_point.z() - p_g.z()) < 0.5 * cfg_.tol_z) {
    grip = -1.0;
  }

  Eigen::Vector3d move = (target - p_g - wave_step) / cfg_.beta_pos;
  move = move.cwiseMax(-1.0).cwiseMin(1.0);
  const double dyaw = std::clamp(yaw_err / cfg_.beta_yaw, -1.0, 1.0);
  const sim::ActionCommand cmd(move.x(), move.y(), move.z(), dyaw, grip);
  last_command_delta_ = Eigen::Vector3d(cmd.dx(), cmd.dy(), cmd.dz()) * cfg_.beta_pos;
  return cmd;
}

TrialTrace run_trial(const sim::EnvConfig& env_cfg, Policy& policy, const wave::SeaStateSpec& sea, std::uint64_t seed,
                     int step_limit) {
  sim::EnvConfig cfg = env_cfg;
  cfg.terminate_on_success = true;
  sim::Environment env(cfg);
  env.set_step_limit(step_limit);
  policy.reset();

  TrialTrace trace;
  trace.sea_state = sea.wmo_code;
  trace.seed = seed;
  trace.rows.reserve(static_cast<std::size_t>(step_limit));
  sim::StackedObservation obs = env.reset(seed, sea);
  while (env.active()) {
    const sim::StepResult r = env.step(policy.act(obs));
    obs = r.observation;
    trace.rows.push_back({env.state().time, r.info.dist, r.info.cube_z, r.info.wave_offset, r.reward});
    if (r.info.success) {
      trace.success = true;
      trace.steps_to_success = env.state().step;
      break;
    }
  }
  return trace;
}

EvalReport evaluate(Policy& policy, const sim::EnvConfig& env_cfg, const EvalProtocol& protocol) {
  validate(protocol);
  sim::EnvConfig cfg = env_cfg;
  cfg.lift_success = protocol.success_lift;
  sim::validate(cfg);
  const int limit = step_limit(protocol, cfg);

  EvalReport report;
  for (int code : protocol.sea_states) {
    const wave::SeaStateSpec sea = wave::preset(code);
    StateResult result;
    result.sea_state = code;
    result.trials = protocol.trials;
    double step_sum = 0.0;
    for (int i = 0; i < protocol.trials; ++i) {
      TrialTrace t = run_trial(cfg, policy, sea, protocol.base_seed + static_cast<std::uint64_t>(i), limit);
      t.trial = i;
      if (t.success) {
        result.successes += 1;
        step_sum += t.steps_to_success;
      }
      result.traces.push_back(std::move(t));
    }
    result.success_rate = static_cast<double>(result.successes) / protocol.trials;
    if (result.successes > 0) result.mean_steps = step_sum / result.successes;
    report.states.push_back(std::move(result));
  }
  return report;
}

EvalReport evaluate(const PolicyCheckpoint& ckpt, const sim::EnvConfig& env_cfg, const EvalProtocol& protocol) {
  ActorPolicy policy(ckpt.make_actor());
  return evaluate(policy, env_cfg, protocol);
}

double distance_decay_stat(const TrialTrace& trace) {
  if (trace.rows.empty()) throw InputError("distance_decay_stat: empty trace");
  const std::size_t n = trace.rows.size();
  const std::size_t q = std::max<std::size_t>(1, n / 4);
  auto max_dist = [&](std::size_t begin, std::size_t end) {
    double m = trace.rows[begin].dist;
    for (std::size_t i = begin; i < end; ++i) m = std::max(m, trace.rows[i].dist);
    return m;
  };
  return max_dist(0, q) - max_dist(n - q, n);
}

void write_trace_csv(const TrialTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace: " + path.string());
  out << "t,dist,cube_z,wave_x,wave_y,wave_z,reward\n" << std::setprecision(17);
  for (const auto& r : trace.rows) {
    out << r.t << ',' << r.dist << ',' << r.cube_z << ',' << r.wave.x() << ',' << r.wave.y() << ',' << r.wave.z()
        << ',' << r.reward << '\n';
  }
}

nlohmann::json write_report(const EvalReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "traces", ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string() + ": " + ec.message());

  nlohmann::json summary = nlohmann::json::object();
  for (const auto& s : report.states) {
    nlohmann::json files = nlohmann::json::array();
    for (const auto& t : s.traces) {
      const std::string name =
          "traces/trace_s" + std::to_string(s.sea_state) + "_t" + std::to_string(t.trial) + ".csv";
      write_trace_csv(t, out_dir / name);
      files.push_back(name);
    }
    summary[std::to_string(s.sea_state)] = {
        {"success_rate", s.success_rate},
        {"trials", s.trials},
        {"mean_steps", s.mean_steps ? nlohmann::json(*s.mean_steps) : nlohmann::json(nullptr)},
        {"trace_files", files}};
  }
  std::ofstream out(out_dir / "summary.json");
  if (!out) throw IoError("cannot write " + (out_dir / "summary.json").string());
  out << summary.dump(2) << '\n';
  return summary;
}

}  // namespace wavegrasp::eval
