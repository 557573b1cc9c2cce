#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liveprint/commands.hpp"
#include "liveprint/error.hpp"
#include "liveprint/synth.hpp"

namespace fs = std::filesystem;
using namespace liveprint;

namespace {

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
}

std::string json_path_for(const std::string& out) { return out.empty() ? std::string() : out + ".json"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fingerprint liveness detection from image quality measures"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "Config file (falls back to $LIVEPRINT_CONFIG)");

  std::string manifest, out, sensor, features, seg_image, theta_csv, ring_csv;
  std::vector<std::string> subsets, sensors;
  bool json = false;

  auto* extract = app.add_subcommand("extract", "Extract the ten quality features for a manifest");
  extract->add_option("--manifest", manifest)->required();
  extract->add_option("--out", out, "Feature CSV")->required();

  auto* select = app.add_subcommand("select", "Exhaustive feature subset selection for one sensor");
  select->add_option("--features", features, "Feature CSV")->required();
  select->add_option("--sensor", sensor)->required();
  select->add_option("--out", out, "Report file (stdout if omitted)");
  select->add_flag("--json", json, "Emit JSON instead of the table");

  auto* evaluate = app.add_subcommand("evaluate", "Cross-sensor evaluation of fixed subsets");
  evaluate->add_option("--features", features, "Feature CSV")->required();
  evaluate->add_option("--subset", subsets, "[sensor:]Q_A,Q_B (repeatable)")->required();
  evaluate->add_option("--sensor", sensors, "Restrict to these sensors (repeatable)");
  evaluate->add_option("--out", out, "Report file (stdout if omitted)");
  evaluate->add_flag("--json", json, "Emit JSON instead of the table");

  auto* seg = app.add_subcommand("segment", "Write the foreground block mask of one image");
  seg->add_option("image", seg_image)->required();
  seg->add_option("--out", out, "Mask PGM, one pixel per block")->required();
  seg->add_option("--orientation-csv", theta_csv, "Per-block orientation dump");
  seg->add_option("--ring-csv", ring_csv, "Ring energy profile dump");

  std::string kind = "parallel";
  SynthSpec spec;
  int corpus = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic fingerprint or a liveness corpus");
  synth->add_option("--kind", kind, "parallel|whorl|noise|mixed|disc-on-flat");
  synth->add_option("--width", spec.width);
  synth->add_option("--height", spec.height);
  synth->add_option("--angle", spec.angle_deg, "Degrees");
  synth->add_option("--period", spec.period);
  synth->add_option("--amplitude", spec.amplitude);
  synth->add_option("--noise", spec.noise_sigma);
  synth->add_option("--blur", spec.blur_sigma);
  synth->add_option("--cell", spec.cell, "Checkerboard cell size for mixed");
  synth->add_option("--seed", spec.seed);
  synth->add_option("--corpus", corpus, "Write N real + N fake images and a manifest into --out");
  synth->add_option("--sensor", sensor, "Sensor name for --corpus manifests");
  synth->add_option("--out", out, "Output PGM (or directory with --corpus)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ToolConfig cfg = load_config(opt_path(config_path));

    if (*extract) {
      const auto outcome = cmd_extract(manifest, cfg, out, std::cerr);
      if (outcome.failures > 0) {
        std::cerr << outcome.failures << " sample(s) failed, see " << error_log_path(out).string() << "\n";
      }
      return outcome.exit_code;
    }
    if (*select) {
      const auto report = cmd_select(parse_feature_csv(read_text_file(features)), sensor);
      emit(json ? to_json(report).dump(2) + "\n" : render_selection_table(report, cfg.report_precision), out);
      if (!json && !out.empty()) write_text_file(json_path_for(out), to_json(report).dump(2) + "\n");
      return kExitOk;
    }
    if (*evaluate) {
      const auto report = cmd_evaluate(parse_feature_csv(read_text_file(features)), subsets, sensors);
      emit(json ? to_json(report).dump(2) + "\n" : render_cross_sensor(report, cfg.report_precision), out);
      if (!json && !out.empty()) write_text_file(json_path_for(out), to_json(report).dump(2) + "\n");
      return kExitOk;
    }
    if (*seg) {
      const GrayImage img = read_pgm_file(seg_image);
      const auto& fc = cfg.features;
      const SegmentationMask mask = segment(img, fc.gabor, fc.block_size);
      write_pgm_file(out, mask_image(mask));
      if (!theta_csv.empty()) write_text_file(theta_csv, orientation_csv(orientation_field(img, mask.grid)));
      if (!ring_csv.empty()) write_text_file(ring_csv, ring_profile_csv(power_spectrum_profile(img, mask, fc.spectrum)));
      return kExitOk;
    }
    if (*synth) {
      if (corpus > 0) {
        const auto path = write_synthetic_corpus(out, corpus, spec.seed, sensor.empty() ? "synthetic" : sensor);
        std::cout << path.string() << "\n";
        return kExitOk;
      }
      spec.kind = parse_synth_kind(kind);
      write_pgm_file(out, gen_synthetic_fingerprint(spec));
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
