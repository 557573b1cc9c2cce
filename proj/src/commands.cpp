#include "liveprint/commands.hpp"

#include <cstdio>
#include <map>
#include <set>

#include "liveprint/error.hpp"
#include "liveprint/synth.hpp"

namespace liveprint {

std::filesystem::path error_log_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  p += ".errors.log";
  return p;
}

ExtractOutcome cmd_extract(const std::filesystem::path& manifest, const ToolConfig& cfg,
                           const std::filesystem::path& out, std::ostream& warnings) {
  cfg.validate();
  const auto records = parse_manifest(read_text_file(manifest));
  const std::filesystem::path base = manifest.parent_path();

  std::string csv = std::string(kFeatureCsvHeader) + "\n";
  std::string errors;
  ExtractOutcome outcome;
  for (const auto& r : records) {
    const std::filesystem::path image_path = std::filesystem::path(r.path).is_absolute() ? std::filesystem::path(r.path) : base / r.path;
    try {
      const Extraction e = extract_all(read_pgm_file(image_path), cfg.features);
      if (e.lcs1_fallback) warnings << "warning: " << r.path << ": no reliable block, Q_LCS1 set to Q_LCS2\n";
      csv += feature_csv_row(LabeledSample{r.path, r.sensor, r.label, r.material, e.features}) + "\n";
      ++outcome.rows;
    } catch (const Error& e) {
      errors += r.path + "," + std::string(error_name(e.code())) + "," + e.detail() + "\n";
      ++outcome.failures;
    }
  }
  write_text_file(out, csv);
  const auto log = error_log_path(out);
  if (outcome.failures > 0) {
    write_text_file(log, errors);
    outcome.exit_code = kExitSampleFailures;
  } else {
    std::filesystem::remove(log);
  }
  return outcome;
}

SelectionReport cmd_select(const std::vector<LabeledSample>& samples, const std::string& sensor) {
  std::vector<LabeledSample> subset;
  for (const auto& s : samples)
    if (s.sensor == sensor) subset.push_back(s);
  if (subset.empty()) throw Error(ErrorCode::UnknownSensor, "no samples for sensor '" + sensor + "'");
  int n_real = 0, n_fake = 0;
  for (const auto& s : subset) ++(s.label == Label::Real ? n_real : n_fake);
  if (n_real < 3 || n_fake < 3) {
    throw Error(ErrorCode::TooFewSamples, "sensor '" + sensor + "' has " + std::to_string(n_real) + " real and " +
                                              std::to_string(n_fake) + " fake samples; need 3 of each");
  }
  return exhaustive_select(subset);
}

NamedSubset parse_subset_spec(const std::string& spec) {
  NamedSubset named;
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    named.own_sensor = spec.substr(0, colon);
    named.mask = SubsetMask::parse(spec.substr(colon + 1));
    named.name = "Best subset for " + *named.own_sensor;
  } else {
    named.mask = SubsetMask::parse(spec);
    named.name = "Subset";
  }
  return named;
}

CrossSensorReport cmd_evaluate(const std::vector<LabeledSample>& samples, const std::vector<std::string>& subset_specs,
                               const std::vector<std::string>& sensors) {
  std::vector<NamedSubset> subsets;
  for (const auto& spec : subset_specs) subsets.push_back(parse_subset_spec(spec));
  if (subsets.empty()) throw Error(ErrorCode::BadFeatureName, "no subset given");

  std::map<std::string, std::vector<LabeledSample>> datasets;
  const std::set<std::string> wanted(sensors.begin(), sensors.end());
  for (const auto& s : samples)
    if (wanted.empty() || wanted.count(s.sensor)) datasets[s.sensor].push_back(s);
  for (const auto& name : wanted)
    if (!datasets.count(name)) throw Error(ErrorCode::UnknownSensor, "no samples for sensor '" + name + "'");
  if (datasets.empty()) throw Error(ErrorCode::UnknownSensor, "feature file has no samples");
  for (const auto& [sensor, rows] : datasets) {
    int n_real = 0, n_fake = 0;
    for (const auto& s : rows) ++(s.label == Label::Real ? n_real : n_fake);
    if (n_real < 3 || n_fake < 3) {
      throw Error(ErrorCode::TooFewSamples, "sensor '" + sensor + "' needs 3 samples of each class");
    }
  }
  return cross_sensor_report(datasets, subsets);
}

std::string orientation_csv(const OrientationField& field) {
  std::string out = "block_x,block_y,theta_radians\n";
  char buf[96];
  for (int i = 0; i < field.grid.count(); ++i) {
    const BlockIndex b = field.grid.index(i);
    std::snprintf(buf, sizeof buf, "%d,%d,%.6f\n", b.bx, b.by, field.theta[i]);
    out += buf;
  }
  return out;
}

std::string ring_profile_csv(const SpectralProfile& profile) {
  std::string out = "ring_index,f_center,p_i\n";
  char buf[96];
  for (std::size_t k = 0; k < profile.ring_energies.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f\n", k, profile.ring_centers[k], profile.ring_energies[k]);
    out += buf;
  }
  return out;
}

std::filesystem::path write_synthetic_corpus(const std::filesystem::path& dir, int per_class, std::uint64_t seed,
                                             const std::string& sensor) {
  std::filesystem::create_directories(dir);
  std::string manifest = "path,label,sensor,material\n";
  for (const auto& s : synth_liveness_corpus(per_class, seed)) {
    const std::string file = s.id + ".pgm";
    write_pgm_file(dir / file, s.image);
    manifest += file + "," + (s.real ? "real" : "fake") + "," + sensor + "," + (s.real ? "" : "synthetic") + "\n";
  }
  const auto path = dir / "manifest.csv";
  write_text_file(path, manifest);
  return path;
}

}  // namespace liveprint
