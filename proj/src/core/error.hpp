#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bugworld {

enum class ErrorCode {
  kUnknownEnv,
  kUnknownBug,
  kUnknownBehaviour,
  kUnknownCmd,
  kEpisodeDone,
  kNotReset,
  kNoEnv,
  kMalformed,
  kTargetNotFound,
  kInvalidAction,
  kBehaviourExternal,
  kBadArgument,
  kIo,
};

// Stable string form used on the wire and in the C API.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bugworld
