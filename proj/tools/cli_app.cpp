#include "cli_app.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include "manifest.hpp"
#include "wavegrasp/checkpoint.hpp"
#include "wavegrasp/config_io.hpp"
#include "wavegrasp/diagnostics.hpp"
#include "wavegrasp/errors.hpp"
#include "wavegrasp/eval.hpp"
#include "wavegrasp/train.hpp"

namespace wavegrasp::cli {

namespace {

constexpr const char* kDeviationNotes = R"(
Defaults that depart from the original setup (all overridable with --set):
  env.beta_pos=0.05 m/step, env.beta_yaw=0.1 rad/step  (a raw factor of 0.5 would cross the workspace in one step)
  critic input is 35 = 30 stacked-observation slots + 5 actions (not 40)
  actor hidden layers are [256, 256]
  twin critics with Polyak-averaged targets (sac.tau=0.005)
  train.episodes=1000, sac.batch_size=64 (single-core training budget)
  training episodes run their full length; success does not terminate them
)";

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void configure_logging() {
  static bool configured = false;
  if (!configured) {
    auto logger = spdlog::stderr_color_mt("wavegrasp");
    spdlog::set_default_logger(logger);
    configured = true;
  }
  spdlog::set_level(spdlog::level::info);
  if (const char* lvl = std::getenv(kLogLevelEnv)) spdlog::set_level(spdlog::level::from_str(lvl));
}

// Precedence: command-line flag > --set override > config file > built-in default.
RunConfig resolve(const CommonOptions& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : load_run_config(opts.config_path);
  for (const auto& o : opts.overrides) apply_override(cfg, o);
  return cfg;
}

// Runs fn; on an exception the manifest is closed with status "failed" first.
template <typename Fn>
auto guarded(RunManifest& manifest, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    try {
      manifest.finish("failed", {{"error", e.what()}});
    } catch (const std::exception&) {
    }
    throw;
  }
}

int cmd_train(const CommonOptions& opts, std::optional<int> episodes, std::ostream& out) {
  RunConfig cfg = resolve(opts);
  if (opts.seed) cfg.train.seed = *opts.seed;
  if (episodes) cfg.train.episodes = *episodes;
  if (!opts.out_dir.empty()) cfg.train.out_dir = opts.out_dir;
  validate(cfg);

  RunManifest manifest(cfg.train.out_dir, "train", to_json(cfg), cfg.train.seed);
  manifest.begin();
  const auto result = guarded(manifest, [&] { return train::train(cfg.env, cfg.sac, cfg.train, config_hash(cfg)); });
  int successes = 0;
  for (const auto& e : result.episodes) successes += e.success ? 1 : 0;
  nlohmann::json artifacts = {
      {"final_checkpoint", result.final_checkpoint_path.string()},
      {"final_checkpoint_hash", git_blob_hash_file(result.final_checkpoint_path)},
      {"episodes_csv", (cfg.train.out_dir / "episodes.csv").string()},
      {"smoothed_csv", (cfg.train.out_dir / "smoothed.csv").string()},
      {"gradient_updates", result.gradient_updates},
      {"training_success_rate", static_cast<double>(successes) / static_cast<double>(result.episodes.size())}};
  manifest.finish("completed", artifacts);
  out << "final checkpoint: " << result.final_checkpoint_path.string() << '\n';
  return kExitOk;
}

int cmd_eval(const CommonOptions& opts, const std::string& checkpoint_path, const std::vector<int>& states,
             std::optional<int> trials, std::ostream& out) {
  RunConfig cfg = resolve(opts);
  if (opts.seed) cfg.eval.base_seed = *opts.seed;
  if (!states.empty()) cfg.eval.sea_states = states;
  if (trials) cfg.eval.trials = *trials;
  validate(cfg);
  const std::filesystem::path out_dir = opts.out_dir.empty() ? std::filesystem::path("runs/eval") : std::filesystem::path(opts.out_dir);

  const PolicyCheckpoint ckpt = load_checkpoint(checkpoint_path);
  RunManifest manifest(out_dir, "eval", to_json(cfg), cfg.eval.base_seed);
  manifest.begin();
  const auto report = guarded(manifest, [&] {
    auto r = eval::evaluate(ckpt, cfg.env, cfg.eval);
    eval::write_report(r, out_dir);
    return r;
  });
  manifest.finish("completed", {{"checkpoint", checkpoint_path},
                                {"checkpoint_hash", git_blob_hash_file(checkpoint_path)},
                                {"summary", (out_dir / "summary.json").string()}});
  for (const auto& s : report.states) {
    out << "sea_state " << s.sea_state << "  success_rate " << s.success_rate << "  (" << s.successes << "/"
        << s.trials << ")\n";
  }
  return kExitOk;
}

int cmd_diagnose(bool inject_gradient_fault, std::ostream& out) {
  diagnostics::Options opts;
  opts.inject_gradient_fault = inject_gradient_fault;
  const auto results = diagnostics::run_all(opts);
  diagnostics::print(results, out);
  return diagnostics::all_passed(results) ? kExitOk : kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();

  CLI::App app{"Wave-disturbed grasping: kinematic simulator, SAC trainer and sea-state evaluation"};
  app.footer(kDeviationNotes);
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "YAML config file (sections env, sac, train, eval)");
    sub->add_option("--set", common.overrides, "Override a config key, e.g. --set sac.lr=3e-4")
        ->type_name("KEY=VALUE");
    sub->add_option("--seed", common.seed, "Seed (default " + std::to_string(kDefaultSeed) + ")");
    sub->add_option("--out", common.out_dir, "Output directory");
  };

  auto* train_cmd = app.add_subcommand("train", "Train a SAC policy in calm water");
  add_common(train_cmd);
  std::optional<int> episodes;
  train_cmd->add_option("--episodes", episodes, "Number of training episodes");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint under WMO sea states");
  add_common(eval_cmd);
  std::string checkpoint;
  std::vector<int> states;
  std::optional<int> trials;
  eval_cmd->add_option("--checkpoint", checkpoint, "Policy checkpoint (.wgc)")->required();
  eval_cmd->add_option("--sea-state", states, "WMO sea-state codes (default 0 1 2)")->expected(1, 3);
  eval_cmd->add_option("--trials", trials, "Trials per sea state (default 15)");

  auto* diag_cmd = app.add_subcommand("diagnose", "Run fast self-checks; one PASS/FAIL line per check");
  bool inject_fault = false;
  diag_cmd->add_flag("--inject-gradient-fault", inject_fault, "Test hook: corrupt analytic gradients")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(common, episodes, out);
    if (*eval_cmd) return cmd_eval(common, checkpoint, states, trials, out);
    if (*diag_cmd) return cmd_diagnose(inject_fault, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace wavegrasp::cli
