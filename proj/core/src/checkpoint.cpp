#include "wavegrasp/checkpoint.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>

#include "binary_io.hpp"
#include "wavegrasp/errors.hpp"

namespace wavegrasp {

namespace {

constexpr char kMagic[8] = {'W', 'G', 'P', 'O', 'L', 'I', 'C', 'Y'};
constexpr std::size_t kMaxBlob = std::size_t{1} << 32;
constexpr std::uint32_t kFlagCritics = 1u;

}  // namespace

PolicyCheckpoint PolicyCheckpoint::from_agent(const sac::SacAgent& agent, std::uint64_t config_hash,
                                              std::uint64_t episode, std::uint64_t seed, bool with_critics) {
  PolicyCheckpoint c;
  c.config_hash = config_hash;
  c.episode = episode;
  c.seed = seed;
  c.normalizer = agent.actor().normalizer();
  c.log_std_min = agent.actor().log_std_min();
  c.log_std_max = agent.actor().log_std_max();
  c.actor = agent.actor().net();
  if (with_critics) {
    c.critics = CriticSet{agent.q1(), agent.q2(), agent.q1_target(), agent.q2_target(), agent.log_alpha()};
  }
  return c;
}

sac::Actor PolicyCheckpoint::make_actor() const {
  if (obs_dim != sim::kStackedObsDim || action_dim != sim::kActionDim) {
    throw CheckpointIncompatibleError("checkpoint dims (obs " + std::to_string(obs_dim) + ", action " +
                                      std::to_string(action_dim) + ") do not match the environment (obs " +
                                      std::to_string(sim::kStackedObsDim) + ", action " +
                                      std::to_string(sim::kActionDim) + ")");
  }
  return sac::Actor(actor, normalizer, log_std_min, log_std_max);
}

std::string to_bytes(const PolicyCheckpoint& ckpt) {
  std::ostringstream os(std::ios::binary);
  detail::ByteWriter w(os);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kCheckpointFormatVersion);
  w.u64(ckpt.config_hash);
  w.u32(ckpt.obs_dim);
  w.u32(ckpt.action_dim);
  w.u64(ckpt.episode);
  w.u64(ckpt.seed);
  for (double v : ckpt.normalizer.offset) w.f64(v);
  for (double v : ckpt.normalizer.scale) w.f64(v);
  w.f64(ckpt.log_std_min);
  w.f64(ckpt.log_std_max);
  w.u32(ckpt.critics ? kFlagCritics : 0u);
  w.str(nn::serialize(ckpt.actor));
  if (ckpt.critics) {
    w.str(nn::serialize(ckpt.critics->q1));
    w.str(nn::serialize(ckpt.critics->q2));
    w.str(nn::serialize(ckpt.critics->q1_target));
    w.str(nn::serialize(ckpt.critics->q2_target));
    w.f64(ckpt.critics->log_alpha);
  }
  return std::move(os).str();
}

PolicyCheckpoint from_bytes(std::string_view bytes) {
  std::istringstream is(std::string(bytes), std::ios::binary);
  detail::ByteReader r(is, "checkpoint");
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw CorruptCheckpointError("checkpoint: bad magic (not a policy checkpoint)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointFormatVersion) {
    throw CheckpointVersionError("checkpoint: unsupported format version " + std::to_string(version) +
                                 " (expected " + std::to_string(kCheckpointFormatVersion) + ")");
  }
  PolicyCheckpoint c;
  c.config_hash = r.u64();
  c.obs_dim = r.u32();
  c.action_dim = r.u32();
  c.episode = r.u64();
  c.seed = r.u64();
  // The normalizer is sized for the environment; a foreign dim cannot be parsed further.
  if (c.obs_dim != sim::kStackedObsDim || c.action_dim != sim::kActionDim) {
    throw CheckpointIncompatibleError("checkpoint dims (obs " + std::to_string(c.obs_dim) + ", action " +
                                      std::to_string(c.action_dim) + ") do not match the environment");
  }
  for (double& v : c.normalizer.offset) v = r.f64();
  for (double& v : c.normalizer.scale) v = r.f64();
  c.log_std_min = r.f64();
  c.log_std_max = r.f64();
  const std::uint32_t flags = r.u32();
  if ((flags & ~kFlagCritics) != 0) throw CorruptCheckpointError("checkpoint: unknown flags");
  c.actor = nn::deserialize(r.str(kMaxBlob));
  if (flags & kFlagCritics) {
    CriticSet cs;
    cs.q1 = nn::deserialize(r.str(kMaxBlob));
    cs.q2 = nn::deserialize(r.str(kMaxBlob));
    cs.q1_target = nn::deserialize(r.str(kMaxBlob));
    cs.q2_target = nn::deserialize(r.str(kMaxBlob));
    cs.log_alpha = r.f64();
    c.critics = std::move(cs);
  }
  if (is.peek() != std::char_traits<char>::eof()) throw CorruptCheckpointError("checkpoint: trailing bytes");
  return c;
}

void save_checkpoint(const PolicyCheckpoint& ckpt, const std::filesystem::path& path) {
  const std::string bytes = to_bytes(ckpt);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

PolicyCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_bytes(bytes);
}

std::string checkpoint_filename(std::uint64_t episode, std::uint64_t seed) {
  return "ckpt_ep" + std::to_string(episode) + "_seed" + std::to_string(seed) + ".wgc";
}

}  // namespace wavegrasp
