#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace drivepg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid shapes, architectures, tracks, or configuration values.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its contract (empty batch, stale cache, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during learning. Carries the offending layer when known.
class TrainingError : public Error {
 public:
  static constexpr std::size_t kNoLayer = static_cast<std::size_t>(-1);

  explicit TrainingError(const std::string& what, std::size_t layer = kNoLayer)
      : Error(layer == kNoLayer ? what : what + " (layer " + std::to_string(layer) + ")"),
        layer_(layer) {}

  std::size_t layer() const noexcept { return layer_; }

 private:
  std::size_t layer_;
};

/// Filesystem failure: unreadable input or unwritable output.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed checkpoint or data file. `field()` names the part that failed.
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace drivepg
