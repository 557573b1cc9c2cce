#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liveprint/classifier.hpp"
#include "liveprint/features.hpp"

namespace liveprint {

/// Every tunable constant of the pipeline. Loaded from a flat "key = value"
/// file with dotted keys; '#' starts a comment.
///
///   block_size                      16
///   gabor.orientations              8
///   gabor.frequency                 0.1
///   gabor.sigma                     4.0
///   gabor.threshold                 0.01
///   spectrum.rings                  15
///   spectrum.f_lo                   0.06
///   spectrum.f_hi                   0.45
///   cof.threshold                   0.39269908169872414  (pi/8)
///   sinusoid.window_length          32
///   sinusoid.window_width           16
///   sinusoid.min_period             3
///   sinusoid.max_period             25
///   sinusoid.min_amplitude          4      (gray levels)
///   sinusoid.amplitude_threshold    0.031372549019607843  (8/255)
///   sinusoid.variance_ratio         0.5
///   report.precision                2
struct ToolConfig {
  FeatureConfig features;
  int report_precision = 2;

  void validate() const;
};

ToolConfig parse_config(std::string_view text);
std::string render_config(const ToolConfig& cfg);
/// Reads `path` if given, else $LIVEPRINT_CONFIG if set, else defaults.
ToolConfig load_config(const std::optional<std::filesystem::path>& path);

struct ManifestRecord {
  std::string path;
  Label label = Label::Real;
  std::string sensor;
  std::optional<std::string> material;
};

/// CSV with header "path,label,sensor,material".
std::vector<ManifestRecord> parse_manifest(std::string_view text);

inline constexpr std::string_view kFeatureCsvHeader =
    "sample_id,sensor,label,Q_OCL,Q_E,Q_LOQ,Q_COF,Q_MEAN,Q_STD,Q_LCS1,Q_LCS2,Q_A,Q_VAR";

/// One data row (no trailing newline), features with 6 decimals.
std::string feature_csv_row(const LabeledSample& sample);
std::vector<LabeledSample> parse_feature_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace liveprint
