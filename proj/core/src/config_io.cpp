#include "wavegrasp/config_io.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>

#include "wavegrasp/errors.hpp"

namespace wavegrasp {

namespace {

struct Field {
  std::function<void(RunConfig&, const YAML::Node&)> set;
  std::function<nlohmann::json(const RunConfig&)> get;
};

template <typename T>
T read_scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(key, std::string("cannot parse value: ") + e.what());
  }
}

template <int N>
Eigen::Matrix<double, N, 1> read_fixed(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() != static_cast<std::size_t>(N)) {
    throw ConfigError(key, "expected a list of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = read_scalar<double>(node[i], key);
  return v;
}

template <int N>
nlohmann::json fixed_json(const Eigen::Matrix<double, N, 1>& v) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < N; ++i) j.push_back(v[i]);
  return j;
}

template <typename T>
struct Codec {
  static T read(const YAML::Node& n, const std::string& key) { return read_scalar<T>(n, key); }
  static nlohmann::json write(const T& v) { return v; }
};

template <>
struct Codec<Eigen::Vector3d> {
  static Eigen::Vector3d read(const YAML::Node& n, const std::string& key) { return read_fixed<3>(n, key); }
  static nlohmann::json write(const Eigen::Vector3d& v) { return fixed_json<3>(v); }
};

template <>
struct Codec<Eigen::Vector2d> {
  static Eigen::Vector2d read(const YAML::Node& n, const std::string& key) { return read_fixed<2>(n, key); }
  static nlohmann::json write(const Eigen::Vector2d& v) { return fixed_json<2>(v); }
};

template <>
struct Codec<std::vector<int>> {
  static std::vector<int> read(const YAML::Node& n, const std::string& key) {
    if (!n.IsSequence()) throw ConfigError(key, "expected a list of integers");
    std::vector<int> out;
    for (const auto& item : n) out.push_back(read_scalar<int>(item, key));
    return out;
  }
  static nlohmann::json write(const std::vector<int>& v) { return v; }
};

template <>
struct Codec<std::filesystem::path> {
  static std::filesystem::path read(const YAML::Node& n, const std::string& key) {
    return read_scalar<std::string>(n, key);
  }
  static nlohmann::json write(const std::filesystem::path& v) { return v.string(); }
};

template <typename Section, typename T>
Field field(Section RunConfig::*section, T Section::*member, std::string key) {
  return Field{[section, member, key](RunConfig& c, const YAML::Node& n) {
                 (c.*section).*member = Codec<T>::read(n, key);
               },
               [section, member](const RunConfig& c) { return Codec<T>::write((c.*section).*member); }};
}

const std::map<std::string, Field>& registry() {
  static const std::map<std::string, Field> fields = [] {
    std::map<std::string, Field> f;
    auto env = [&f](std::string k, auto member) { f.emplace("env." + k, field(&RunConfig::env, member, "env." + k)); };
    env("beta_pos", &sim::EnvConfig::beta_pos);
    env("beta_yaw", &sim::EnvConfig::beta_yaw);
    env("dt", &sim::EnvConfig::dt);
    env("cube_side", &sim::EnvConfig::cube_side);
    env("w_max", &sim::EnvConfig::w_max);
    env("aperture_speed", &sim::EnvConfig::aperture_speed);
    env("workspace_lo", &sim::EnvConfig::workspace_lo);
    env("workspace_hi", &sim::EnvConfig::workspace_hi);
    env("spawn_lo", &sim::EnvConfig::spawn_lo);
    env("spawn_hi", &sim::EnvConfig::spawn_hi);
    env("home", &sim::EnvConfig::home);
    env("episode_len_train", &sim::EnvConfig::episode_len_train);
    env("lift_partial", &sim::EnvConfig::lift_partial);
    env("lift_success", &sim::EnvConfig::lift_success);
    env("tol_xy", &sim::EnvConfig::tol_xy);
    env("tol_z", &sim::EnvConfig::tol_z);
    env("tol_yaw", &sim::EnvConfig::tol_yaw);
    env("grasp_height_offset", &sim::EnvConfig::grasp_height_offset);
    env("terminate_on_success", &sim::EnvConfig::terminate_on_success);
    env("rng_seed", &sim::EnvConfig::rng_seed);

    auto sac = [&f](std::string k, auto member) { f.emplace("sac." + k, field(&RunConfig::sac, member, "sac." + k)); };
    sac("actor_hidden", &sac::SacConfig::actor_hidden);
    sac("critic_hidden", &sac::SacConfig::critic_hidden);
    sac("gamma", &sac::SacConfig::gamma);
    sac("lr", &sac::SacConfig::lr);
    sac("initial_alpha", &sac::SacConfig::initial_alpha);
    sac("auto_alpha", &sac::SacConfig::auto_alpha);
    sac("target_entropy", &sac::SacConfig::target_entropy);
    sac("tau", &sac::SacConfig::tau);
    sac("batch_size", &sac::SacConfig::batch_size);
    sac("buffer_capacity", &sac::SacConfig::buffer_capacity);
    sac("warmup_steps", &sac::SacConfig::warmup_steps);
    sac("updates_per_step", &sac::SacConfig::updates_per_step);
    sac("log_std_min", &sac::SacConfig::log_std_min);
    sac("log_std_max", &sac::SacConfig::log_std_max);

    auto tr = [&f](std::string k, auto member) {
      f.emplace("train." + k, field(&RunConfig::train, member, "train." + k));
    };
    tr("episodes", &train::TrainConfig::episodes);
    tr("steps_per_episode", &train::TrainConfig::steps_per_episode);
    tr("checkpoint_interval", &train::TrainConfig::checkpoint_interval);
    tr("eval_interval", &train::TrainConfig::eval_interval);
    tr("eval_episodes", &train::TrainConfig::eval_episodes);
    tr("smoothing_window", &train::TrainConfig::smoothing_window);
    tr("log_interval", &train::TrainConfig::log_interval);
    tr("seed", &train::TrainConfig::seed);
    tr("out_dir", &train::TrainConfig::out_dir);
    tr("terminate_on_success", &train::TrainConfig::terminate_on_success);

    auto ev = [&f](std::string k, auto member) { f.emplace("eval." + k, field(&RunConfig::eval, member, "eval." + k)); };
    ev("trials", &eval::EvalProtocol::trials);
    ev("time_limit_s", &eval::EvalProtocol::time_limit_s);
    ev("success_lift", &eval::EvalProtocol::success_lift);
    ev("sea_states", &eval::EvalProtocol::sea_states);
    ev("base_seed", &eval::EvalProtocol::base_seed);
    return f;
  }();
  return fields;
}

void set_key(RunConfig& cfg, const std::string& key, const YAML::Node& value) {
  const auto& reg = registry();
  const auto it = reg.find(key);
  if (it == reg.end()) throw ConfigError(key, "unknown configuration key");
  it->second.set(cfg, value);
}

void merge_node(RunConfig& cfg, const YAML::Node& root) {
  if (root.IsNull()) return;
  if (!root.IsMap()) throw ConfigError("<root>", "config must be a mapping of sections");
  for (const auto& section : root) {
    const auto name = section.first.as<std::string>();
    if (!section.second.IsMap()) throw ConfigError(name, "section must be a mapping");
    for (const auto& kv : section.second) set_key(cfg, name + "." + kv.first.as<std::string>(), kv.second);
  }
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("config file not found: " + path.string());
  RunConfig cfg;
  try {
    merge_node(cfg, YAML::LoadFile(path.string()));
  } catch (const YAML::Exception& e) {
    throw ConfigError(path.string(), std::string("YAML parse error: ") + e.what());
  }
  return cfg;
}

void merge_yaml(RunConfig& cfg, std::string_view yaml_text) {
  try {
    merge_node(cfg, YAML::Load(std::string(yaml_text)));
  } catch (const YAML::Exception& e) {
    throw ConfigError("<yaml>", std::string("YAML parse error: ") + e.what());
  }
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError(std::string(assignment), "override must look like section.key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  YAML::Node node;
  try {
    node = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw ConfigError(key, std::string("cannot parse override value: ") + e.what());
  }
  set_key(cfg, key, node);
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, f] : registry()) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = f.get(cfg);
  }
  return j;
}

void validate(const RunConfig& cfg) {
  sim::validate(cfg.env);
  sac::validate(cfg.sac);
  train::validate(cfg.train);
  eval::validate(cfg.eval);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const nlohmann::json j = to_json(cfg);
  const std::string canon = nlohmann::json{{"env", j["env"]}, {"sac", j["sac"]}}.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : registry()) keys.push_back(k);
  return keys;
}

}  // namespace wavegrasp
