#pragma once

#include <stdexcept>
#include <string>

namespace lumptrack {

/// Bad argument to a geometric or filter operation (non-finite input,
/// size mismatch, out-of-range index).
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Point at or behind the image plane (depth below the guard epsilon).
class BehindCameraError : public std::runtime_error {
 public:
  explicit BehindCameraError(const std::string& what) : std::runtime_error(what) {}
};

/// Camera center inside or on the cylinder; the silhouette is not two lines.
class DegenerateViewError : public std::runtime_error {
 public:
  explicit DegenerateViewError(const std::string& what) : std::runtime_error(what) {}
};

/// Cylinder axis passes through the camera center; both edge lines vanish.
class DegenerateAxisError : public std::runtime_error {
 public:
  explicit DegenerateAxisError(const std::string& what) : std::runtime_error(what) {}
};

/// All particle weights collapsed to zero (or became non-finite).
class DegenerateFilterError : public std::runtime_error {
 public:
  explicit DegenerateFilterError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration file or inconsistent configuration values.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lumptrack
