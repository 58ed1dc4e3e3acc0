#include "error.hpp"

namespace bugworld {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownEnv: return "UNKNOWN_ENV";
    case ErrorCode::kUnknownBug: return "UNKNOWN_BUG";
    case ErrorCode::kUnknownBehaviour: return "UNKNOWN_BEHAVIOUR";
    case ErrorCode::kUnknownCmd: return "UNKNOWN_CMD";
    case ErrorCode::kEpisodeDone: return "EPISODE_DONE";
    case ErrorCode::kNotReset: return "NOT_RESET";
    case ErrorCode::kNoEnv: return "NO_ENV";
    case ErrorCode::kMalformed: return "MALFORMED";
    case ErrorCode::kTargetNotFound: return "TARGET_NOT_FOUND";
    case ErrorCode::kInvalidAction: return "INVALID_ACTION";
    case ErrorCode::kBehaviourExternal: return "BEHAVIOUR_EXTERNAL";
    case ErrorCode::kBadArgument: return "BAD_ARGUMENT";
    case ErrorCode::kIo: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace bugworld
