#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace home {

enum class ErrorCode {
  ParseError,
  ValidationError,
  ParamError,
  NotWatertight,
  CameraOutOfBounds,
  DegenerateGeometry,
  RangeError,
  RateMismatch,
  UnknownObject,
  StaticObject,
  OutOfReach,
  HandsFull,
  TooHeavy,
  NothingHeld,
  ConfigError,
  NoHousesAvailable,
  SpawnFailure,
  NotReset,
  UnknownAgent,
  UnknownSource,
  BindError,
  ProtocolError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every engine reports failures through this one exception type; `code()`
/// is the stable, machine-readable part and `what()` starts with its name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : ": " + detail)),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Validation failure carrying the document path of the offending entity,
/// e.g. "objects[0].room_id".
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& detail)
      : Error(ErrorCode::ValidationError, path + (detail.empty() ? "" : " (" + detail + ")")),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace home
