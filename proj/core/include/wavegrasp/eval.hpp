#ifndef WAVEGRASP_EVAL_HPP_
#define WAVEGRASP_EVAL_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "wavegrasp/checkpoint.hpp"
#include "wavegrasp/rng.hpp"
#include "wavegrasp/sac.hpp"
#include "wavegrasp/sim.hpp"
#include "wavegrasp/wave.hpp"

namespace wavegrasp::eval {

struct EvalProtocol {
  int trials = 15;
  double time_limit_s = 30.0;
  double success_lift = 0.20;
  std::vector<int> sea_states{0, 1, 2};
  // Trial i of every sea state uses seed base_seed + i.
  std::uint64_t base_seed = kDefaultSeed;
};

void validate(const EvalProtocol& p);

// Step limit implied by the time window, round(time_limit_s / dt).
int step_limit(const EvalProtocol& p, const sim::EnvConfig& env);

struct TraceRow {
  double t = 0.0;
  double dist = 0.0;
  double cube_z = 0.0;
  Eigen::Vector3d wave = Eigen::Vector3d::Zero();
  double reward = 0.0;
};

// One row per environment step (post-step state).
struct TrialTrace {
  int sea_state = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::vector<TraceRow> rows;
  bool success = false;
  int steps_to_success = -1;
};

struct StateResult {
  int sea_state = 0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  std::optional<double> mean_steps;  // over successful trials
  std::vector<TrialTrace> traces;
};

struct EvalReport {
  std::vector<StateResult> states;

  const StateResult& state(int wmo_code) const;
};

// Closed-loop controller driven by stacked observations.
class Policy {
 public:
  virtual ~Policy() = default;
  // Called before every trial.
  virtual void reset() {}
  virtual sim::ActionCommand act(const sim::StackedObservation& obs) = 0;
};

// Deterministic-mode (tanh of the mean) actor.
class ActorPolicy final : public Policy {
 public:
  explicit ActorPolicy(sac::Actor actor) : actor_(std::move(actor)) {}
  sim::ActionCommand act(const sim::StackedObservation& obs) override;

 private:
  sac::Actor actor_;
  Rng unused_rng_{0};
};

// Hand-written go-to-cube, close, lift controller. It reads only the
// stacked observation and compensates base motion with a constant-velocity
// prediction from the last two observations.
class ScriptedGraspPolicy final : public Policy {
 public:
  explicit ScriptedGraspPolicy(sim::EnvConfig cfg) : cfg_(std::move(cfg)) {}
  void reset() override;
  sim::ActionCommand act(const sim::StackedObservation& obs) override;

 private:
  sim::EnvConfig cfg_;
  std::optional<Eigen::Vector3d> last_command_delta_;
};

TrialTrace run_trial(const sim::EnvConfig& env_cfg, Policy& policy, const wave::SeaStateSpec& sea, std::uint64_t seed,
                     int step_limit);

// Runs protocol.trials trials per requested sea state (presets).
EvalReport evaluate(Policy& policy, const sim::EnvConfig& env_cfg, const EvalProtocol& protocol);

// Throws CheckpointIncompatibleError when the checkpoint does not match the environment.
EvalReport evaluate(const PolicyCheckpoint& ckpt, const sim::EnvConfig& env_cfg, const EvalProtocol& protocol);

// (max distance over the first quarter of the trace) - (max over the last
// quarter). Positive when the distance peaks shrink over the trial.
double distance_decay_stat(const TrialTrace& trace);

// Writes summary.json and traces/trace_s<state>_t<trial>.csv under out_dir.
// Summary schema: {"<state>": {success_rate, trials, mean_steps, trace_files}}.
nlohmann::json write_report(const EvalReport& report, const std::filesystem::path& out_dir);

// CSV columns: t,dist,cube_z,wave_x,wave_y,wave_z,reward
void write_trace_csv(const TrialTrace& trace, const std::filesystem::path& path);

}  // namespace wavegrasp::eval

#endif  // WAVEGRASP_EVAL_HPP_
