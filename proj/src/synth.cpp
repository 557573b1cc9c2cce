#include "liveprint/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "liveprint/error.hpp"

namespace liveprint {

namespace {

constexpr double kPi = std::numbers::pi;

struct Canvas {
  int width;
  int height;
  std::vector<double> v;

  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
};

void blur_in_place(Canvas& c, double sigma) {
  if (sigma <= 0.0) return;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * r + 1);
  double total = 0.0;
  for (int d = -r; d <= r; ++d) total += taps[d + r] = std::exp(-d * d / (2.0 * sigma * sigma));
  for (double& t : taps) t /= total;

  std::vector<double> tmp(c.v.size());
  for (int y = 0; y < c.height; ++y) {
    for (int x = 0; x < c.width; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d) acc += taps[d + r] * c.at(std::clamp(x + d, 0, c.width - 1), y);
      tmp[static_cast<std::size_t>(y) * c.width + x] = acc;
    }
  }
  for (int y = 0; y < c.height; ++y) {
    for (int x = 0; x < c.width; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d) {
        acc += taps[d + r] * tmp[static_cast<std::size_t>(std::clamp(y + d, 0, c.height - 1)) * c.width + x];
      }
      c.at(x, y) = acc;
    }
  }
}

GrayImage quantize(const Canvas& c) {
  std::vector<std::uint8_t> px(c.v.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>(std::clamp(std::lround(c.v[i]), 0L, 255L));
  return GrayImage(c.width, c.height, std::move(px));
}

double parallel_value(const SynthSpec& s, double x, double y) {
  const double a = s.angle_deg * kPi / 180.0;
  const double u = -x * std::sin(a) + y * std::cos(a);
  return 128.0 - s.amplitude * std::sin(2.0 * kPi * u / s.period);
}

double whorl_value(const SynthSpec& s, double x, double y) {
  const double r = std::hypot(x - (s.width - 1) / 2.0, y - (s.height - 1) / 2.0);
  return 128.0 - s.amplitude * std::sin(2.0 * kPi * r / s.period);
}

double disc_radius(const SynthSpec& s) { return 0.3 * std::min(s.width, s.height); }

bool in_disc(const SynthSpec& s, double x, double y) {
  return std::hypot(x - (s.width - 1) / 2.0, y - (s.height - 1) / 2.0) <= disc_radius(s);
}

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view synth_kind_name(SynthKind kind) {
  switch (kind) {
    case SynthKind::Parallel: return "parallel";
    case SynthKind::Whorl: return "whorl";
    case SynthKind::Noise: return "noise";
    case SynthKind::Mixed: return "mixed";
    case SynthKind::DiscOnFlat: return "disc-on-flat";
  }
  return "parallel";
}

SynthKind parse_synth_kind(std::string_view name) {
  for (auto k : {SynthKind::Parallel, SynthKind::Whorl, SynthKind::Noise, SynthKind::Mixed, SynthKind::DiscOnFlat}) {
    if (synth_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::BadSpec, "unknown synthetic kind '" + std::string(name) + "'");
}

void SynthSpec::validate() const {
  if (width < 16 || height < 16 || width > 8192 || height > 8192) throw Error(ErrorCode::BadSpec, "size out of range");
  if (!(period >= 2.0)) throw Error(ErrorCode::BadSpec, "period must be >= 2 px");
  if (!(amplitude >= 0.0 && amplitude <= 255.0)) throw Error(ErrorCode::BadSpec, "amplitude out of range");
  if (!(noise_sigma >= 0.0) || !(blur_sigma >= 0.0)) throw Error(ErrorCode::BadSpec, "negative sigma");
  if (kind == SynthKind::Mixed && cell < 1) throw Error(ErrorCode::BadSpec, "cell must be positive");
}

GrayImage gen_synthetic_fingerprint(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Canvas c{spec.width, spec.height, std::vector<double>(static_cast<std::size_t>(spec.width) * spec.height, 128.0)};

  switch (spec.kind) {
    case SynthKind::Parallel:
    case SynthKind::DiscOnFlat:
      for (int y = 0; y < c.height; ++y)
        for (int x = 0; x < c.width; ++x) c.at(x, y) = parallel_value(spec, x, y);
      break;
    case SynthKind::Whorl:
      for (int y = 0; y < c.height; ++y)
        for (int x = 0; x < c.width; ++x) c.at(x, y) = whorl_value(spec, x, y);
      break;
    case SynthKind::Noise:
      break;
    case SynthKind::Mixed:
      for (int y = 0; y < c.height; ++y)
        for (int x = 0; x < c.width; ++x)
          if (((x / spec.cell) + (y / spec.cell)) % 2 == 0) c.at(x, y) = parallel_value(spec, x, y);
      break;
  }

  blur_in_place(c, spec.blur_sigma);

  if (spec.noise_sigma > 0.0) {
    for (int y = 0; y < c.height; ++y) {
      for (int x = 0; x < c.width; ++x) {
        const double n = gauss(rng) * spec.noise_sigma;
        switch (spec.kind) {
          case SynthKind::Mixed:
            if (((x / spec.cell) + (y / spec.cell)) % 2 == 1) c.at(x, y) += n;
            break;
          case SynthKind::DiscOnFlat:
            if (in_disc(spec, x, y)) c.at(x, y) += n;
            break;
          default:
            c.at(x, y) += n;
        }
      }
    }
  }

  if (spec.kind == SynthKind::DiscOnFlat) {
    for (int y = 0; y < c.height; ++y)
      for (int x = 0; x < c.width; ++x)
        if (!in_disc(spec, x, y)) c.at(x, y) = 200.0;
  }
  return quantize(c);
}

std::vector<std::uint8_t> disc_block_truth(const SynthSpec& spec, int block_size) {
  const int nx = spec.width / block_size;
  const int ny = spec.height / block_size;
  std::vector<std::uint8_t> truth(static_cast<std::size_t>(nx) * ny, 0);
  for (int by = 0; by < ny; ++by) {
    for (int bx = 0; bx < nx; ++bx) {
      const double x = bx * block_size + (block_size - 1) / 2.0;
      const double y = by * block_size + (block_size - 1) / 2.0;
      truth[static_cast<std::size_t>(by) * nx + bx] = in_disc(spec, x, y) ? 1 : 0;
    }
  }
  return truth;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  Canvas c{img.width(), img.height(), std::vector<double>(img.pixels().begin(), img.pixels().end())};
  blur_in_place(c, sigma);
  return quantize(c);
}

std::vector<SynthSample> synth_liveness_corpus(int per_class, std::uint64_t seed, int width, int height) {
  std::vector<SynthSample> corpus;
  corpus.reserve(static_cast<std::size_t>(per_class) * 2);
  std::uint64_t state = seed;
  for (int i = 0; i < 2 * per_class; ++i) {
    const bool real = i < per_class;
    std::mt19937_64 rng(splitmix(state));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SynthSpec s;
    s.kind = unit(rng) < 0.5 ? SynthKind::Parallel : SynthKind::Whorl;
    s.width = width;
    s.height = height;
    s.angle_deg = 180.0 * unit(rng);
    s.period = 8.0 + 4.0 * unit(rng);
    s.amplitude = 70.0 + 40.0 * unit(rng);
    if (real) {
      s.noise_sigma = 2.0 + 4.0 * unit(rng);
    } else {
      s.blur_sigma = 1.5 + 1.0 * unit(rng);
      s.noise_sigma = 12.0 + 8.0 * unit(rng);
    }
    s.seed = splitmix(state);
    corpus.push_back({(real ? "real_" : "fake_") + std::to_string(real ? i : i - per_class), real,
                      gen_synthetic_fingerprint(s)});
  }
  return corpus;
}

}  // namespace liveprint
