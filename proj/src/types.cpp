#include "copguide/error.hpp"
#include "copguide/types.hpp"

#include <string>

namespace copguide {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kWrongLength: return "WrongLength";
    case ErrorCode::kTruncatedFrame: return "TruncatedFrame";
    case ErrorCode::kInvalidCalibration: return "InvalidCalibration";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kSourceUnavailable: return "SourceUnavailable";
    case ErrorCode::kMalformedLogLine: return "MalformedLogLine";
    case ErrorCode::kOutOfOrderSample: return "OutOfOrderSample";
    case ErrorCode::kNoActiveTarget: return "NoActiveTarget";
    case ErrorCode::kSessionFinished: return "SessionFinished";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kModalityMismatch: return "ModalityMismatch";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kTransport: return "Transport";
  }
  return "Unknown";
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::kHaptic: return "haptic";
    case Modality::kVisual: return "visual";
    case Modality::kAudio: return "audio";
  }
  return "unknown";
}

Modality parse_modality(std::string_view s) {
  if (s == "haptic" || s == "h") return Modality::kHaptic;
  if (s == "visual" || s == "v") return Modality::kVisual;
  if (s == "audio" || s == "a") return Modality::kAudio;
  throw Error(ErrorCode::kInvalidConfig, "unknown modality '" + std::string(s) + "'");
}

std::size_t index_of(Modality m) { return static_cast<std::size_t>(m); }

}  // namespace copguide
