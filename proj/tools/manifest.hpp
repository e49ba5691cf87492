#ifndef WAVEGRASP_TOOLS_MANIFEST_HPP_
#define WAVEGRASP_TOOLS_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

namespace wavegrasp::cli {

// Git blob object id: SHA-1 over "blob <size>\0" followed by the content.
std::string git_blob_hash(const std::string& content);
std::string git_blob_hash_file(const std::filesystem::path& path);

// Run record written to <out_dir>/manifest.json before compute starts and
// rewritten with end time, status and artifact hashes on completion.
class RunManifest {
 public:
  RunManifest(std::filesystem::path out_dir, std::string command, nlohmann::json config, std::uint64_t seed);

  void begin();
  void finish(const std::string& status, const nlohmann::json& artifacts = nlohmann::json::object());

  const nlohmann::json& json() const { return doc_; }

 private:
  void write() const;

  std::filesystem::path path_;
  nlohmann::json doc_;
};

}  // namespace wavegrasp::cli

#endif  // WAVEGRASP_TOOLS_MANIFEST_HPP_
