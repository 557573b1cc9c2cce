#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "liveprint/error.hpp"
#include "liveprint/segmentation.hpp"
#include "liveprint/synth.hpp"
#include "oracles.hpp"

using namespace liveprint;

namespace {

GrayImage parallel(int w, int h, double angle, double period, double amp, double noise, std::uint64_t seed) {
  SynthSpec s;
  s.width = w;
  s.height = h;
  s.angle_deg = angle;
  s.period = period;
  s.amplitude = amp;
  s.noise_sigma = noise;
  s.seed = seed;
  return gen_synthetic_fingerprint(s);
}

}  // namespace

TEST_CASE("constant block has zero feature") {
  const GrayImage img(64, 64, 90);
  const BlockGrid g = block_partition(img);
  CHECK(gabor_block_feature(img, g, {1, 1}) == 0.0);
}

TEST_CASE("direct block feature matches full convolution oracle") {
  std::mt19937 rng(11);
  for (int t = 0; t < 4; ++t) {
    const GrayImage img = parallel(64, 64, 17.0 * t, 7 + t, 60, 15, 100 + t);
    const BlockGrid g = block_partition(img);
    for (BlockIndex b : {BlockIndex{0, 0}, BlockIndex{1, 2}, BlockIndex{3, 3}}) {
      const double expect = oracle::gabor_block_feature(img, b.bx * 16, b.by * 16, 16);
      CHECK(gabor_block_feature(img, g, b) == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("fast feature map equals the direct path") {
  const GrayImage img = parallel(96, 80, 40, 9, 70, 20, 3);
  const BlockGrid g = block_partition(img);
  const auto map = gabor_feature_map(img, g);
  for (int i = 0; i < g.count(); ++i) {
    CHECK(map[i] == doctest::Approx(gabor_block_feature(img, g, g.index(i))).epsilon(1e-9));
  }
}

TEST_CASE("sinusoid beats equal-variance white noise over 100 seeds") {
  // Sinusoid at 0 degrees, period 10, amplitude 50: variance 1250.
  const double amp = 50.0;
  const GrayImage sine = parallel(48, 48, 0, 10, amp, 0, 1);
  const double sine_feature = oracle::gabor_block_feature(sine, 16, 16, 16);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SynthSpec n;
    n.kind = SynthKind::Noise;
    n.width = n.height = 48;
    n.noise_sigma = amp / std::sqrt(2.0);
    n.seed = seed;
    const GrayImage noise = gen_synthetic_fingerprint(n);
    CHECK(sine_feature > oracle::gabor_block_feature(noise, 16, 16, 16));
  }
}

TEST_CASE("feature invariant to a constant offset") {
  const GrayImage a = parallel(64, 64, 25, 9, 40, 5, 8);
  GrayImage b = a;
  for (auto& p : b.pixels()) p = static_cast<std::uint8_t>(p + 30 > 255 ? 255 : p + 30);
  // Stay clear of clipping: the pattern spans 128 +/- ~55.
  const BlockGrid g = block_partition(a);
  for (int i = 0; i < g.count(); ++i) {
    const BlockIndex blk = g.index(i);
    // Only interior blocks: zero padding at the image edge is not offset-free.
    if (blk.bx == 0 || blk.by == 0 || blk.bx == g.nx - 1 || blk.by == g.ny - 1) continue;
    CHECK(gabor_block_feature(b, g, blk) == doctest::Approx(gabor_block_feature(a, g, blk)).epsilon(1e-9));
  }
}

TEST_CASE("uniform image has empty foreground") {
  try {
    segment(GrayImage(64, 64, 128));
    FAIL("expected EmptyForeground");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyForeground);
  }
}

TEST_CASE("full-frame sinusoid is all foreground") {
  const SegmentationMask m = segment(parallel(128, 96, 0, 10, 100, 0, 1));
  CHECK(m.foreground_count() == m.grid.count());
  REQUIRE(m.centroid);
  CHECK(m.centroid->x == doctest::Approx(63.5));
  CHECK(m.centroid->y == doctest::Approx(47.5));
}

TEST_CASE("default threshold calibration") {
  // Noise sigma 2 gray levels is background, amplitude-8 sinusoid is foreground.
  SynthSpec n;
  n.kind = SynthKind::Noise;
  n.noise_sigma = 2;
  n.width = n.height = 128;
  const GrayImage noise = gen_synthetic_fingerprint(n);
  const auto nf = gabor_feature_map(noise, block_partition(noise));
  for (double f : nf) CHECK(f < 0.01);
  const GrayImage faint = parallel(128, 128, 33, 10, 8, 0, 1);
  const auto ff = gabor_feature_map(faint, block_partition(faint));
  for (double f : ff) CHECK(f >= 0.01);
}

TEST_CASE("ridged disc on flat background matches geometric truth") {
  // 272 px frame: disc diameter 0.6 * 272 = 163 px, close to 160.
  SynthSpec s;
  s.kind = SynthKind::DiscOnFlat;
  s.width = s.height = 272;
  s.noise_sigma = 3;
  s.seed = 4;
  const SegmentationMask m = segment(gen_synthetic_fingerprint(s));
  const auto truth = disc_block_truth(s);
  int inter = 0, uni = 0;
  for (int i = 0; i < m.grid.count(); ++i) {
    inter += m.foreground[i] && truth[i];
    uni += m.foreground[i] || truth[i];
  }
  const double iou = static_cast<double>(inter) / uni;
  MESSAGE("IoU = " << iou);
  CHECK(iou >= 0.8);
}

TEST_CASE("lowering the threshold never shrinks the foreground") {
  SynthSpec s;
  s.kind = SynthKind::DiscOnFlat;
  s.noise_sigma = 4;
  const GrayImage img = gen_synthetic_fingerprint(s);
  const BlockGrid g = block_partition(img);
  const auto f = gabor_feature_map(img, g);
  SegmentationMask prev = segment_from_features(g, f, 0.05);
  for (double t : {0.03, 0.01, 0.005, 0.001}) {
    const SegmentationMask cur = segment_from_features(g, f, t);
    for (int i = 0; i < g.count(); ++i) CHECK((!prev.foreground[i] || cur.foreground[i]));
    prev = cur;
  }
}

TEST_CASE("shifting content by one block shifts the mask") {
  SynthSpec s;
  s.kind = SynthKind::DiscOnFlat;
  s.width = s.height = 224;
  s.seed = 2;
  const GrayImage img = gen_synthetic_fingerprint(s);
  GrayImage shifted(224, 224, 200);
  for (int y = 0; y < 224; ++y)
    for (int x = 16; x < 224; ++x) shifted.at(x, y) = img.at(x - 16, y);
  const SegmentationMask a = segment(img), b = segment(shifted);
  for (int by = 1; by < a.grid.ny - 1; ++by)
    for (int bx = 1; bx < a.grid.nx - 2; ++bx) CHECK(a.is_foreground({bx, by}) == b.is_foreground({bx + 1, by}));
}

TEST_CASE("centroid inside the foreground bounding box") {
  SynthSpec s;
  s.kind = SynthKind::Mixed;
  s.noise_sigma = 30;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    s.seed = seed;
    const SegmentationMask m = segment(gen_synthetic_fingerprint(s));
    double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
    for (int i = 0; i < m.grid.count(); ++i) {
      if (!m.foreground[i]) continue;
      const BlockIndex b = m.grid.index(i);
      x0 = std::min(x0, m.grid.center_x(b));
      x1 = std::max(x1, m.grid.center_x(b));
      y0 = std::min(y0, m.grid.center_y(b));
      y1 = std::max(y1, m.grid.center_y(b));
    }
    REQUIRE(m.centroid);
    CHECK(m.centroid->x >= x0);
    CHECK(m.centroid->x <= x1);
    CHECK(m.centroid->y >= y0);
    CHECK(m.centroid->y <= y1);
  }
}

TEST_CASE("debug mask image") {
  const BlockGrid g{16, 3, 2};
  const GrayImage m = mask_image(make_mask(g, {1, 0, 1, 0, 0, 1}));
  CHECK(m == GrayImage(3, 2, {255, 0, 255, 0, 0, 255}));
}

TEST_CASE("config validation") {
  GaborBankConfig c;
  c.n_orientations = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.frequency = 0.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.sigma = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}
