#include "liveprint/harness.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "liveprint/error.hpp"

namespace liveprint {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

// Calls fn(line_number, line) for each line, without the line terminator.
void for_each_line(std::string_view text, const std::function<void(int, std::string_view)>& fn) {
  int number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++number, line);
    start = end + 1;
  }
}

double parse_double(std::string_view s, const std::string& what) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::BadConfig, what + ": '" + std::string(s) + "' is not a number");
  }
  return v;
}

int parse_int(std::string_view s, const std::string& what) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::BadConfig, what + ": '" + std::string(s) + "' is not an integer");
  }
  return v;
}

struct ConfigKey {
  std::function<void(ToolConfig&, std::string_view)> set;
  std::function<std::string(const ToolConfig&)> get;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::map<std::string, ConfigKey, std::less<>>& config_keys() {
  auto real = [](double FeatureConfig::*member) {
    return ConfigKey{[member](ToolConfig& c, std::string_view v) { c.features.*member = parse_double(v, "value"); },
                     [member](const ToolConfig& c) { return fmt(c.features.*member); }};
  };
  static const std::map<std::string, ConfigKey, std::less<>> keys = {
      {"block_size",
       {[](ToolConfig& c, std::string_view v) { c.features.block_size = parse_int(v, "block_size"); },
        [](const ToolConfig& c) { return std::to_string(c.features.block_size); }}},
      {"gabor.orientations",
       {[](ToolConfig& c, std::string_view v) { c.features.gabor.n_orientations = parse_int(v, "gabor.orientations"); },
        [](const ToolConfig& c) { return std::to_string(c.features.gabor.n_orientations); }}},
      {"gabor.frequency",
       {[](ToolConfig& c, std::string_view v) { c.features.gabor.frequency = parse_double(v, "gabor.frequency"); },
        [](const ToolConfig& c) { return fmt(c.features.gabor.frequency); }}},
      {"gabor.sigma",
       {[](ToolConfig& c, std::string_view v) { c.features.gabor.sigma = parse_double(v, "gabor.sigma"); },
        [](const ToolConfig& c) { return fmt(c.features.gabor.sigma); }}},
      {"gabor.threshold",
       {[](ToolConfig& c, std::string_view v) { c.features.gabor.threshold = parse_double(v, "gabor.threshold"); },
        [](const ToolConfig& c) { return fmt(c.features.gabor.threshold); }}},
      {"spectrum.rings",
       {[](ToolConfig& c, std::string_view v) { c.features.spectrum.rings = parse_int(v, "spectrum.rings"); },
        [](const ToolConfig& c) { return std::to_string(c.features.spectrum.rings); }}},
      {"spectrum.f_lo",
       {[](ToolConfig& c, std::string_view v) { c.features.spectrum.f_lo = parse_double(v, "spectrum.f_lo"); },
        [](const ToolConfig& c) { return fmt(c.features.spectrum.f_lo); }}},
      {"spectrum.f_hi",
       {[](ToolConfig& c, std::string_view v) { c.features.spectrum.f_hi = parse_double(v, "spectrum.f_hi"); },
        [](const ToolConfig& c) { return fmt(c.features.spectrum.f_hi); }}},
      {"cof.threshold", real(&FeatureConfig::cof_threshold)},
      {"sinusoid.window_length",
       {[](ToolConfig& c, std::string_view v) {
          c.features.sinusoid.window_length = parse_int(v, "sinusoid.window_length");
        },
        [](const ToolConfig& c) { return std::to_string(c.features.sinusoid.window_length); }}},
      {"sinusoid.window_width",
       {[](ToolConfig& c, std::string_view v) {
          c.features.sinusoid.window_width = parse_int(v, "sinusoid.window_width");
        },
        [](const ToolConfig& c) { return std::to_string(c.features.sinusoid.window_width); }}},
      {"sinusoid.min_period",
       {[](ToolConfig& c, std::string_view v) {
          c.features.sinusoid.min_period = parse_double(v, "sinusoid.min_period");
        },
        [](const ToolConfig& c) { return fmt(c.features.sinusoid.min_period); }}},
      {"sinusoid.max_period",
       {[](ToolConfig& c, std::string_view v) {
          c.features.sinusoid.max_period = parse_double(v, "sinusoid.max_period");
        },
        [](const ToolConfig& c) { return fmt(c.features.sinusoid.max_period); }}},
      {"sinusoid.min_amplitude",
       {[](ToolConfig& c, std::string_view v) {
          c.features.sinusoid.min_amplitude = parse_double(v, "sinusoid.min_amplitude");
        },
        [](const ToolConfig& c) { return fmt(c.features.sinusoid.min_amplitude); }}},
      {"sinusoid.amplitude_threshold", real(&FeatureConfig::amplitude_threshold)},
      {"sinusoid.variance_ratio", real(&FeatureConfig::variance_ratio)},
      {"report.precision",
       {[](ToolConfig& c, std::string_view v) { c.report_precision = parse_int(v, "report.precision"); },
        [](const ToolConfig& c) { return std::to_string(c.report_precision); }}},
  };
  return keys;
}

}  // namespace

void ToolConfig::validate() const {
  features.validate();
  if (report_precision < 0 || report_precision > 10) throw Error(ErrorCode::BadConfig, "report.precision out of range");
}

ToolConfig parse_config(std::string_view text) {
  ToolConfig cfg;
  std::set<std::string, std::less<>> seen;
  for_each_line(text, [&](int number, std::string_view line) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::BadConfig, "line " + std::to_string(number) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = config_keys().find(key);
    if (it == config_keys().end()) throw Error(ErrorCode::BadConfig, "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw Error(ErrorCode::BadConfig, "key '" + std::string(key) + "' given twice");
    }
    it->second.set(cfg, value);
  });
  cfg.validate();
  return cfg;
}

std::string render_config(const ToolConfig& cfg) {
  std::string out;
  for (const auto& [key, entry] : config_keys()) out += key + " = " + entry.get(cfg) + "\n";
  return out;
}

ToolConfig load_config(const std::optional<std::filesystem::path>& path) {
  if (path) return parse_config(read_text_file(*path));
  if (const char* env = std::getenv("LIVEPRINT_CONFIG"); env != nullptr && *env != '\0') {
    return parse_config(read_text_file(env));
  }
  return ToolConfig{};
}

std::vector<ManifestRecord> parse_manifest(std::string_view text) {
  std::vector<ManifestRecord> records;
  std::set<std::string, std::less<>> paths;
  bool header = false;
  for_each_line(text, [&](int number, std::string_view line) {
    if (!header) {
      if (trim(line) != "path,label,sensor,material") {
        throw Error(ErrorCode::BadHeader, "manifest must start with 'path,label,sensor,material'");
      }
      header = true;
      return;
    }
    if (trim(line).empty()) return;
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw Error(ErrorCode::MalformedRow, "manifest line " + std::to_string(number) + " has " +
                                               std::to_string(fields.size()) + " fields");
    }
    ManifestRecord r;
    r.path = std::string(trim(fields[0]));
    r.label = parse_label(trim(fields[1]));
    r.sensor = std::string(trim(fields[2]));
    if (r.path.empty() || r.sensor.empty()) {
      throw Error(ErrorCode::MalformedRow, "manifest line " + std::to_string(number) + " lacks path or sensor");
    }
    if (const auto m = trim(fields[3]); !m.empty()) r.material = std::string(m);
    if (!paths.insert(r.path).second) throw Error(ErrorCode::DuplicatePath, r.path);
    records.push_back(std::move(r));
  });
  if (!header) throw Error(ErrorCode::BadHeader, "empty manifest");
  return records;
}

std::string feature_csv_row(const LabeledSample& sample) {
  std::string row = sample.id + "," + sample.sensor + "," + std::string(label_name(sample.label));
  char buf[32];
  for (double v : sample.features.values) {
    std::snprintf(buf, sizeof buf, ",%.6f", v);
    row += buf;
  }
  return row;
}

std::vector<LabeledSample> parse_feature_csv(std::string_view text) {
  std::vector<LabeledSample> samples;
  bool header = false;
  for_each_line(text, [&](int number, std::string_view line) {
    if (!header) {
      if (trim(line) != kFeatureCsvHeader) throw Error(ErrorCode::BadHeader, "unexpected feature CSV header");
      header = true;
      return;
    }
    if (trim(line).empty()) return;
    const auto fields = split(line, ',');
    if (fields.size() != 3 + kFeatureCount) {
      throw Error(ErrorCode::MalformedRow, "feature CSV line " + std::to_string(number) + " has " +
                                               std::to_string(fields.size()) + " columns");
    }
    LabeledSample s;
    s.id = std::string(trim(fields[0]));
    s.sensor = std::string(trim(fields[1]));
    s.label = parse_label(trim(fields[2]));
    for (int i = 0; i < kFeatureCount; ++i) {
      try {
        s.features.values[i] = parse_double(fields[3 + i], std::string(feature_name(i)));
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedRow, "feature CSV line " + std::to_string(number) + ": " + e.what());
      }
    }
    samples.push_back(std::move(s));
  });
  if (!header) throw Error(ErrorCode::BadHeader, "empty feature CSV");
  return samples;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace liveprint
