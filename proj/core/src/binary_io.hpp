#ifndef WAVEGRASP_SRC_BINARY_IO_HPP_
#define WAVEGRASP_SRC_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "wavegrasp/errors.hpp"

namespace wavegrasp::detail {

template <typename T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n) {
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    if (!out_) throw IoError("write failed");
  }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }

 private:
  template <typename T>
  void put(T v) {
    v = to_little_endian(v);
    bytes(&v, sizeof(T));
  }
  std::ostream& out_;
};

class ByteReader {
 public:
  ByteReader(std::istream& in, const char* what) : in_(in), what_(what) {}

  void bytes(void* data, std::size_t n) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw CorruptCheckpointError(std::string(what_) + ": truncated stream");
    }
  }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string str(std::size_t max_len) {
    const std::uint64_t n = u64();
    if (n > max_len) throw CorruptCheckpointError(std::string(what_) + ": implausible block length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

 private:
  template <typename T>
  T get() {
    T v;
    bytes(&v, sizeof(T));
    return to_little_endian(v);
  }
  std::istream& in_;
  const char* what_;
};

}  // namespace wavegrasp::detail

#endif  // WAVEGRASP_SRC_BINARY_IO_HPP_
