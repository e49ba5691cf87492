#ifndef WAVEGRASP_ERRORS_HPP_
#define WAVEGRASP_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace wavegrasp {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value; field() names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("config error [" + field + "]: " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// API used out of order (step after episode end, update on an underfilled buffer).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Malformed numeric input (e.g. non-finite observation).
class InputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

// Truncated stream, bad magic, or size mismatch.
class CorruptCheckpointError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

// Checkpoint dimensions do not match the environment.
class CheckpointIncompatibleError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace wavegrasp

#endif  // WAVEGRASP_ERRORS_HPP_
