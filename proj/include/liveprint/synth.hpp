#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "liveprint/image.hpp"

namespace liveprint {

enum class SynthKind { Parallel, Whorl, Noise, Mixed, DiscOnFlat };

std::string_view synth_kind_name(SynthKind kind);
SynthKind parse_synth_kind(std::string_view name);

/// Parameters of a synthetic ridge pattern. Ridges are dark: the clean
/// profile is 128 - amplitude * sin(2 pi u / period).
struct SynthSpec {
  SynthKind kind = SynthKind::Parallel;
  int width = 256;
  int height = 256;
  double angle_deg = 0.0;    // ridge-flow direction for parallel patterns
  double period = 10.0;      // pixels
  double amplitude = 100.0;  // gray levels
  double noise_sigma = 0.0;  // gray levels, additive Gaussian
  double blur_sigma = 0.0;   // pixels, Gaussian blur applied before noise
  int cell = 64;             // checker cell size for Mixed
  std::uint64_t seed = 1;

  void validate() const;
};

GrayImage gen_synthetic_fingerprint(const SynthSpec& spec);

/// Per-block ground truth for DiscOnFlat: a block is inside when its center
/// lies within the disc. Row-major over block_partition(spec image, block_size).
std::vector<std::uint8_t> disc_block_truth(const SynthSpec& spec, int block_size = 16);

/// Returns a blurred copy of the image (separable Gaussian, replicated edges).
GrayImage gaussian_blur(const GrayImage& img, double sigma);

struct SynthSample {
  std::string id;
  bool real = true;
  GrayImage image;
};

/// Two-class synthetic corpus: real samples are clean ridge patterns with
/// mild noise; fakes are the same kind of pattern degraded by blur and noise.
std::vector<SynthSample> synth_liveness_corpus(int per_class, std::uint64_t seed, int width = 256, int height = 256);

}  // namespace liveprint
