#include "liveprint/error.hpp"

namespace liveprint {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedDepth: return "UnsupportedDepth";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::EmptyForeground: return "EmptyForeground";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::DegenerateBlock: return "DegenerateBlock";
    case ErrorCode::NoReliableBlocks: return "NoReliableBlocks";
    case ErrorCode::DegenerateTraining: return "DegenerateTraining";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::MixedSensors: return "MixedSensors";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::DuplicatePath: return "DuplicatePath";
    case ErrorCode::UnknownSensor: return "UnknownSensor";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::BadFeatureName: return "BadFeatureName";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace liveprint
