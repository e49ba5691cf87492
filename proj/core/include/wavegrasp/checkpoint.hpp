#ifndef WAVEGRASP_CHECKPOINT_HPP_
#define WAVEGRASP_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "wavegrasp/mlp.hpp"
#include "wavegrasp/sac.hpp"

namespace wavegrasp {

// Policy checkpoint file, little-endian throughout:
//   8 bytes  magic "WGPOLICY"
//   u32      format version (kCheckpointFormatVersion)
//   u64      config hash
//   u32      observation dim, u32 action dim
//   u64      episode index, u64 seed
//   f64 x obs_dim  normalizer offset, f64 x obs_dim  normalizer scale
//   f64      log-std min, f64 log-std max
//   u32      flags (bit 0: critics present)
//   u64 + bytes  actor network (nn serialization format)
//   if critics: 4 x (u64 + bytes) for q1, q2, q1 target, q2 target; f64 log alpha
inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct CriticSet {
  nn::Mlp q1, q2, q1_target, q2_target;
  double log_alpha = 0.0;
};

struct PolicyCheckpoint {
  std::uint64_t config_hash = 0;
  std::uint32_t obs_dim = sim::kStackedObsDim;
  std::uint32_t action_dim = sim::kActionDim;
  std::uint64_t episode = 0;
  std::uint64_t seed = 0;
  sac::ObservationNormalizer normalizer = sac::ObservationNormalizer::standard();
  double log_std_min = -20.0;
  double log_std_max = 2.0;
  nn::Mlp actor;
  std::optional<CriticSet> critics;

  static PolicyCheckpoint from_agent(const sac::SacAgent& agent, std::uint64_t config_hash, std::uint64_t episode,
                                     std::uint64_t seed, bool with_critics);

  // Throws CheckpointIncompatibleError when dimensions do not match the environment.
  sac::Actor make_actor() const;
};

std::string to_bytes(const PolicyCheckpoint& ckpt);
PolicyCheckpoint from_bytes(std::string_view bytes);

// Throws IoError when the file cannot be written or read.
void save_checkpoint(const PolicyCheckpoint& ckpt, const std::filesystem::path& path);
PolicyCheckpoint load_checkpoint(const std::filesystem::path& path);

// "ckpt_ep<episode>_seed<seed>.wgc"
std::string checkpoint_filename(std::uint64_t episode, std::uint64_t seed);

}  // namespace wavegrasp

#endif  // WAVEGRASP_CHECKPOINT_HPP_
