#include "manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <sstream>

#include "wavegrasp/errors.hpp"

namespace wavegrasp::cli {

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha1 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return os.str();
}

std::string git_blob_hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  return git_blob_hash(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

RunManifest::RunManifest(std::filesystem::path out_dir, std::string command, nlohmann::json config,
                         std::uint64_t seed)
    : path_(std::move(out_dir) / "manifest.json") {
  doc_ = {{"command", std::move(command)},
          {"version", WAVEGRASP_VERSION},
          {"seed", seed},
          {"config", std::move(config)},
          {"status", "running"},
          {"start_time", nullptr},
          {"end_time", nullptr},
          {"artifacts", nlohmann::json::object()}};
}

void RunManifest::begin() {
  doc_["start_time"] = utc_now();
  write();
}

void RunManifest::finish(const std::string& status, const nlohmann::json& artifacts) {
  doc_["end_time"] = utc_now();
  doc_["status"] = status;
  doc_["artifacts"] = artifacts;
  write();
}

void RunManifest::write() const {
  std::error_code ec;
  std::filesystem::create_directories(path_.parent_path(), ec);
  std::ofstream out(path_);
  if (!out) throw IoError("cannot write manifest " + path_.string());
  out << doc_.dump(2) << '\n';
}

}  // namespace wavegrasp::cli
