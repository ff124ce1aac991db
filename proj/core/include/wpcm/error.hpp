#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wpcm {

enum class ErrorCode {
  NotSpd,
  InvalidParam,
  IndexOutOfRange,
  UnknownBlock,
  SizeGuard,
  HorizonOutOfSegment,
  WaypointUnknown,
  LengthMismatch,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wpcm
