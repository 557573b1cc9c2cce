#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "liveprint/commands.hpp"
#include "liveprint/error.hpp"
#include "liveprint/synth.hpp"

using namespace liveprint;
namespace fs = std::filesystem;

namespace {

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("liveprint_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("manifest parsing") {
  const auto one = parse_manifest("path,label,sensor,material\na.pgm,real,biometrika,\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0].label == Label::Real);
  CHECK(one[0].sensor == "biometrika");
  CHECK_FALSE(one[0].material);

  const auto three = parse_manifest("path,label,sensor,material\nc.pgm,fake,s,gelatin\na.pgm,real,s,\nb.pgm,fake,s,silicone\n");
  REQUIRE(three.size() == 3);
  CHECK(three[0].path == "c.pgm");
  CHECK(three[1].path == "a.pgm");
  CHECK(three[2].path == "b.pgm");
  CHECK(*three[0].material == "gelatin");

  CHECK(error_of([] { parse_manifest("path,label,sensor,material\na.pgm,live,biometrika,\n"); }) == ErrorCode::BadLabel);
  CHECK(error_of([] { parse_manifest("file,label,sensor,material\n"); }) == ErrorCode::BadHeader);
  CHECK(error_of([] { parse_manifest("path,label,sensor,material\na.pgm,real,s,\na.pgm,fake,s,\n"); }) ==
        ErrorCode::DuplicatePath);
  CHECK(error_of([] { parse_manifest("path,label,sensor,material\na.pgm,real\n"); }) == ErrorCode::MalformedRow);
}

TEST_CASE("config parsing") {
  const ToolConfig c = parse_config("# tuned\nspectrum.rings = 12\ncof.threshold=0.5\n\nreport.precision = 3\n");
  CHECK(c.features.spectrum.rings == 12);
  CHECK(c.features.cof_threshold == 0.5);
  CHECK(c.report_precision == 3);
  CHECK(c.features.block_size == 16);
  CHECK(error_of([] { parse_config("spectrum.ringz = 3\n"); }) == ErrorCode::BadConfig);
  CHECK(error_of([] { parse_config("block_size = 16\nblock_size = 8\n"); }) == ErrorCode::BadConfig);
  CHECK(error_of([] { parse_config("gabor.frequency = abc\n"); }) == ErrorCode::BadConfig);
  CHECK(error_of([] { parse_config("spectrum.f_hi = 0.9\n"); }) == ErrorCode::BadConfig);

  // Rendering lists every key and parses back to the same values.
  const ToolConfig d;
  const ToolConfig back = parse_config(render_config(d));
  CHECK(render_config(back) == render_config(d));
  CHECK(back.features.cof_threshold == std::numbers::pi / 8);
  CHECK(back.features.amplitude_threshold == 8.0 / 255.0);
}

TEST_CASE("config file and environment fallback") {
  const fs::path dir = scratch("config");
  write_text_file(dir / "a.cfg", "spectrum.rings = 9\n");
  write_text_file(dir / "b.cfg", "spectrum.rings = 11\n");
  ::setenv("LIVEPRINT_CONFIG", (dir / "b.cfg").c_str(), 1);
  CHECK(load_config(dir / "a.cfg").features.spectrum.rings == 9);
  CHECK(load_config(std::nullopt).features.spectrum.rings == 11);
  ::unsetenv("LIVEPRINT_CONFIG");
  CHECK(load_config(std::nullopt).features.spectrum.rings == 15);
}

TEST_CASE("feature CSV round trip") {
  LabeledSample s;
  s.id = "img_1.pgm";
  s.sensor = "crossmatch";
  s.label = Label::Fake;
  for (int k = 0; k < kFeatureCount; ++k) s.features.values[k] = 0.1 * k + 0.0123456;
  const std::string row = feature_csv_row(s);
  CHECK(row == "img_1.pgm,crossmatch,fake,0.012346,0.112346,0.212346,0.312346,0.412346,0.512346,0.612346,"
               "0.712346,0.812346,0.912346");
  const auto back = parse_feature_csv(std::string(kFeatureCsvHeader) + "\n" + row + "\n");
  REQUIRE(back.size() == 1);
  CHECK(back[0].id == s.id);
  CHECK(back[0].label == Label::Fake);
  CHECK(back[0].features.values[3] == doctest::Approx(0.312346));
  CHECK(error_of([] { parse_feature_csv("a,b\n"); }) == ErrorCode::BadHeader);
}

TEST_CASE("synthetic generator") {
  SynthSpec s;
  const GrayImage a = gen_synthetic_fingerprint(s), b = gen_synthetic_fingerprint(s);
  CHECK(save_pgm(a) == save_pgm(b));
  // Ridges are dark: the clean profile is 128 - A sin(2 pi u / P).
  CHECK(a.at(0, 0) == 128);
  CHECK(a.at(0, 2) == static_cast<int>(std::lround(128 - 100 * std::sin(2 * std::numbers::pi * 0.2))));
  s.noise_sigma = 5;
  s.seed = 2;
  const GrayImage c = gen_synthetic_fingerprint(s);
  s.seed = 3;
  CHECK(save_pgm(c) != save_pgm(gen_synthetic_fingerprint(s)));

  SynthSpec disc;
  disc.kind = SynthKind::DiscOnFlat;
  const GrayImage d = gen_synthetic_fingerprint(disc);
  CHECK(d.at(0, 0) == 200);
  CHECK(d.at(255, 255) == 200);
  const auto truth = disc_block_truth(disc);
  CHECK(truth[0] == 0);
  CHECK(truth[8 * 16 + 8] == 1);

  for (const char* name : {"parallel", "whorl", "noise", "mixed", "disc-on-flat"})
    CHECK(synth_kind_name(parse_synth_kind(name)) == name);
  CHECK(error_of([] { parse_synth_kind("spiral"); }) == ErrorCode::BadSpec);
  SynthSpec bad;
  bad.period = 0;
  CHECK(error_of([&] { gen_synthetic_fingerprint(bad); }) == ErrorCode::BadSpec);
}

TEST_CASE("extract over a synthetic manifest") {
  const fs::path dir = scratch("extract");
  const fs::path manifest = write_synthetic_corpus(dir, 5, 11, "synthetic");
  std::ostringstream warn;
  const fs::path out = dir / "features.csv";
  const ExtractOutcome r = cmd_extract(manifest, ToolConfig{}, out, warn);
  CHECK(r.rows == 10);
  CHECK(r.exit_code == 0);
  CHECK_FALSE(fs::exists(error_log_path(out)));
  const std::string csv = read_text_file(out);
  CHECK(count_lines(csv) == 11);
  std::istringstream lines(csv);
  std::string line;
  while (std::getline(lines, line)) {
    int commas = 0;
    for (char ch : line) commas += ch == ',';
    CHECK(commas == 12);
  }
  // Re-running is byte-identical.
  const fs::path out2 = dir / "features2.csv";
  cmd_extract(manifest, ToolConfig{}, out2, warn);
  CHECK(read_text_file(out2) == csv);
  CHECK(parse_feature_csv(csv).size() == 10);
}

TEST_CASE("one flat image is logged and skipped") {
  const fs::path dir = scratch("flat");
  const fs::path manifest = write_synthetic_corpus(dir, 5, 12, "synthetic");
  std::string text = read_text_file(manifest);
  // Swap the last real image for a flat one.
  write_pgm_file(dir / "real_4.pgm", GrayImage(256, 256, 128));
  std::ostringstream warn;
  const fs::path out = dir / "features.csv";
  const ExtractOutcome r = cmd_extract(manifest, ToolConfig{}, out, warn);
  CHECK(r.rows == 9);
  CHECK(r.failures == 1);
  CHECK(r.exit_code == 1);
  CHECK(count_lines(read_text_file(out)) == 10);
  const std::string log = read_text_file(error_log_path(out));
  CHECK(count_lines(log) == 1);
  CHECK(log.rfind("real_4.pgm,EmptyForeground,", 0) == 0);
}

TEST_CASE("select and evaluate commands") {
  std::vector<LabeledSample> rows;
  for (const char* sensor : {"a", "b"}) {
    for (int i = 0; i < 12; ++i) {
      LabeledSample s;
      s.id = std::string(sensor) + std::to_string(i);
      s.sensor = sensor;
      s.label = i % 2 ? Label::Fake : Label::Real;
      for (int k = 0; k < kFeatureCount; ++k) s.features.values[k] = 0.01 * ((i * 7 + k * 3) % 11);
      s.features.values[1] = s.label == Label::Real ? 0.9 + 0.001 * i : 0.2 + 0.001 * i;
      rows.push_back(s);
    }
  }
  const SelectionReport r = cmd_select(rows, "a");
  CHECK(r.sensor == "a");
  CHECK(r.optimum.result.ace == 0.0);
  CHECK(r.optimum.result.n_real + r.optimum.result.n_fake == 12);  // rows of "b" ignored
  const std::string table = render_selection_table(r);
  CHECK(table.find("ACE 0.00%") != std::string::npos);
  CHECK(error_of([&] { cmd_select(rows, "c"); }) == ErrorCode::UnknownSensor);

  std::vector<LabeledSample> few(rows.begin(), rows.begin() + 4);
  CHECK(error_of([&] { cmd_select(few, "a"); }) == ErrorCode::TooFewSamples);

  const NamedSubset n = parse_subset_spec("Q_E,Q_STD");
  CHECK(n.mask.flags() == "0100010000");
  CHECK_FALSE(n.own_sensor);
  CHECK(*parse_subset_spec("a:Q_E").own_sensor == "a");
  CHECK(error_of([&] { cmd_evaluate(rows, {"Q_FOO"}, {}); }) == ErrorCode::BadFeatureName);

  const CrossSensorReport one = cmd_evaluate(rows, {"Q_E,Q_STD"}, {"a"});
  REQUIRE(one.tables[0].rows.size() == 1);
  CHECK(one.tables[0].total.ace == one.tables[0].rows[0].second.ace);
  const CrossSensorReport both = cmd_evaluate(rows, {"a:Q_E", "b:Q_E,Q_OCL"}, {});
  CHECK(both.tables[0].rows.size() == 2);
  REQUIRE(both.grey_cell);
}

TEST_CASE("debug exports") {
  const BlockGrid g{16, 2, 1};
  const OrientationField f{g, {0.5, 1.25}, {0, 0}};
  CHECK(orientation_csv(f) == "block_x,block_y,theta_radians\n0,0,0.500000\n1,0,1.250000\n");
  SpectralProfile p;
  p.ring_energies = {0.25, 0.75};
  p.ring_centers = {0.1, 0.2};
  CHECK(ring_profile_csv(p) == "ring_index,f_center,p_i\n0,0.100000,0.250000\n1,0.200000,0.750000\n");
}
