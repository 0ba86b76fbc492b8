#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvdc {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid values fed to a math operation (negative depth, bad pixel range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Structural misuse: mismatched resolutions, too few views, bad settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Point maps to infinity or behind the target camera.
class ProjectionError : public Error {
 public:
  using Error::Error;
};

// Not enough jointly-valid pixels to estimate the covariance model.
class InsufficientStatistics : public Error {
 public:
  using Error::Error;
};

// Semantic rejection of an otherwise well-formed file (bad rotation, z range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, size_t byte_offset)
      : Error(msg + " at byte " + std::to_string(byte_offset)),
        offset_(byte_offset) {}

  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

}  // namespace mvdc
