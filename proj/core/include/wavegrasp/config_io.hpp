#ifndef WAVEGRASP_CONFIG_IO_HPP_
#define WAVEGRASP_CONFIG_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "wavegrasp/eval.hpp"
#include "wavegrasp/sac.hpp"
#include "wavegrasp/sim.hpp"
#include "wavegrasp/train.hpp"

namespace wavegrasp {

// Every tunable of a run. Built-in defaults live in the member initializers
// of the section structs.
struct RunConfig {
  sim::EnvConfig env;
  sac::SacConfig sac;
  train::TrainConfig train;
  eval::EvalProtocol eval;
};

// Config files are YAML with one mapping per section:
//
//   env:   { beta_pos: 0.05, ... }
//   sac:   { gamma: 0.98, ... }
//   train: { episodes: 1000, ... }
//   eval:  { trials: 15, ... }
//
// Keys absent from the file keep their defaults; unknown keys are an error.
// Throws IoError when the file is missing and ConfigError on bad content.
RunConfig load_run_config(const std::filesystem::path& path);

// Merges a parsed YAML document (same layout as a file) into cfg.
void merge_yaml(RunConfig& cfg, std::string_view yaml_text);

// Applies "section.key=value"; value is parsed as YAML (so lists use [a, b]).
void apply_override(RunConfig& cfg, std::string_view assignment);

// Full resolved configuration, keyed like the file format.
nlohmann::json to_json(const RunConfig& cfg);

// Checks every section.
void validate(const RunConfig& cfg);

// FNV-1a 64 over the canonical JSON of the env and sac sections.
std::uint64_t config_hash(const RunConfig& cfg);

// All recognized "section.key" names.
std::vector<std::string> config_keys();

}  // namespace wavegrasp

#endif  // WAVEGRASP_CONFIG_IO_HPP_
