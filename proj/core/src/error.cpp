#include "wpcm/error.hpp"

namespace wpcm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotSpd: return "NotSpd";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnknownBlock: return "UnknownBlock";
    case ErrorCode::SizeGuard: return "SizeGuard";
    case ErrorCode::HorizonOutOfSegment: return "HorizonOutOfSegment";
    case ErrorCode::WaypointUnknown: return "WaypointUnknown";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace wpcm
