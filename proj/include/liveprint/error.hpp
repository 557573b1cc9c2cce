#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace liveprint {

enum class ErrorCode {
  MalformedHeader,
  TruncatedData,
  UnsupportedDepth,
  ImageTooSmall,
  EmptyForeground,
  ZeroEnergy,
  DegenerateBlock,
  NoReliableBlocks,
  DegenerateTraining,
  ZeroVariance,
  MixedSensors,
  BadHeader,
  MalformedRow,
  BadLabel,
  DuplicatePath,
  UnknownSensor,
  TooFewSamples,
  BadFeatureName,
  BadSpec,
  BadConfig,
  IoError,
};

std::string_view error_name(ErrorCode code) noexcept;

/// Every failure raised by the toolkit carries one of the codes above; the
/// CLI logs error_name(code()) per failed sample.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace liveprint
