#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "liveprint/harness.hpp"
#include "liveprint/ridge.hpp"
#include "liveprint/selection.hpp"

namespace liveprint {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSampleFailures = 1;
inline constexpr int kExitUsage = 2;

struct ExtractOutcome {
  int rows = 0;
  int failures = 0;
  int exit_code = kExitOk;
};

/// Extracts features for every manifest record (paths relative to the
/// manifest's directory) and writes the feature CSV to `out`. Failed samples
/// are listed in `<out>.errors.log` as "sample_id,ErrorName,detail".
ExtractOutcome cmd_extract(const std::filesystem::path& manifest, const ToolConfig& cfg,
                           const std::filesystem::path& out, std::ostream& warnings);

std::filesystem::path error_log_path(const std::filesystem::path& out);

/// Exhaustive subset search over one sensor's rows.
SelectionReport cmd_select(const std::vector<LabeledSample>& samples, const std::string& sensor);

/// "Q_E,Q_STD" or "sensor:Q_E,Q_STD"; the prefixed form marks the subset as
/// that sensor's own optimum.
NamedSubset parse_subset_spec(const std::string& spec);

/// Evaluates each subset on each listed sensor (all sensors when empty).
CrossSensorReport cmd_evaluate(const std::vector<LabeledSample>& samples, const std::vector<std::string>& subset_specs,
                               const std::vector<std::string>& sensors);

std::string orientation_csv(const OrientationField& field);
std::string ring_profile_csv(const SpectralProfile& profile);

/// Writes a two-class synthetic corpus (PGM files plus manifest.csv) into
/// `dir`; returns the manifest path.
std::filesystem::path write_synthetic_corpus(const std::filesystem::path& dir, int per_class, std::uint64_t seed,
                                             const std::string& sensor);

}  // namespace liveprint
