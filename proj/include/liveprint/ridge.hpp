#pragma once

#include <cstdint>
#include <vector>

#include "liveprint/image.hpp"
#include "liveprint/segmentation.hpp"

namespace liveprint {

/// Per-pixel Sobel gradients of the unit-normalized image. The 3x3 Sobel sum
/// is divided by 8 so a ramp of slope s per pixel yields gradient s.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> gx;
  std::vector<double> gy;

  double x(int px, int py) const { return gx[static_cast<std::size_t>(py) * width + px]; }
  double y(int px, int py) const { return gy[static_cast<std::size_t>(py) * width + px]; }
};

GradientField compute_gradients(const GrayImage& img);

/// Per-block ridge-flow angle in [0, pi), measured from the +x axis in pixel
/// coordinates (y down). Blocks without gradient energy are flagged degenerate
/// and carry theta = 0.
struct OrientationField {
  BlockGrid grid;
  std::vector<double> theta;
  std::vector<std::uint8_t> degenerate;

  double at(BlockIndex b) const { return theta[grid.linear(b)]; }
  bool is_degenerate(BlockIndex b) const { return degenerate[grid.linear(b)] != 0; }
};

OrientationField orientation_field(const GradientField& gradients, const BlockGrid& grid);
OrientationField orientation_field(const GrayImage& img, const BlockGrid& grid);

/// Circular distance between two ridge angles, in [0, pi/2].
double angle_difference(double a, double b);

struct GradientCovariance {
  double jxx = 0.0;
  double jxy = 0.0;
  double jyy = 0.0;
  double lambda_max = 0.0;
  double lambda_min = 0.0;
};

GradientCovariance covariance_from_moments(double jxx, double jxy, double jyy);
GradientCovariance gradient_covariance_block(const GradientField& gradients, const BlockGrid& grid, BlockIndex block);

struct SpectrumConfig {
  int rings = 15;
  double f_lo = 0.06;  // cycles per pixel
  double f_hi = 0.45;

  void validate() const;
};

/// |F(u,v)|^2 over the full W x H frequency plane, row-major in (v, u).
struct PowerSpectrum {
  int width = 0;
  int height = 0;
  std::vector<double> power;

  double at(int u, int v) const { return power[static_cast<std::size_t>(v) * width + u]; }
};

/// Radial frequency (cycles/pixel) of DFT bin (u, v) for a W x H transform.
double radial_frequency(int u, int v, int width, int height);

/// Transform of the unit-gray image with the foreground mean removed and
/// background blocks (and partial border strips) zeroed.
PowerSpectrum power_spectrum(const GrayImage& img, const SegmentationMask& mask);

struct SpectralProfile {
  std::vector<double> ring_energies;  // normalized, sums to 1
  std::vector<double> ring_centers;   // cycles per pixel
  double entropy = 0.0;               // natural log
};

SpectralProfile ring_profile(const PowerSpectrum& spectrum, const SpectrumConfig& cfg = {});
SpectralProfile power_spectrum_profile(const GrayImage& img, const SegmentationMask& mask,
                                       const SpectrumConfig& cfg = {});

struct SinusoidConfig {
  int window_length = 32;      // across ridges, pixels
  int window_width = 16;       // along ridges, pixels
  double min_period = 3.0;     // reliability window, pixels
  double max_period = 25.0;
  double min_amplitude = 4.0;  // gray levels

  void validate() const;
};

/// Samples of the oriented window around a block center. Row k runs along the
/// ridge at across-ridge offset k; signature[k] is the mean of the row's
/// in-image samples. The window is truncated to the image: rows entirely
/// outside are dropped and remaining outside samples are NaN.
struct XSignature {
  int length = 0;
  int width = 0;
  std::vector<double> samples;  // gray levels, index k * width + j
  std::vector<double> signature;

  double sample(int k, int j) const { return samples[static_cast<std::size_t>(k) * width + j]; }
};

/// signature[k] ~ mean_level + cos_coef*cos(2 pi k / period) + sin_coef*sin(2 pi k / period)
struct SinusoidFit {
  double amplitude = 0.0;          // gray levels, (mean peak - mean valley) / 2
  double period = 0.0;             // pixels
  double residual_variance = 0.0;  // gray levels^2
  bool valid = false;
  double mean_level = 0.0;
  double cos_coef = 0.0;
  double sin_coef = 0.0;
  double block_variance = 0.0;  // variance of the block's own pixels, gray levels^2

  double model(double k) const;
};

struct SinusoidAnalysis {
  SinusoidFit fit;
  XSignature signature;
};

XSignature extract_signature(const GrayImage& img, const BlockGrid& grid, BlockIndex block, double theta,
                             const SinusoidConfig& cfg = {});

/// Fits the ridge-valley sinusoid to a signature. Throws DegenerateBlock when
/// fewer than two peaks (or no valley) are found.
SinusoidFit fit_signature(const XSignature& sig, const SinusoidConfig& cfg = {});

SinusoidAnalysis sinusoid_fit_block(const GrayImage& img, const BlockGrid& grid, BlockIndex block, double theta,
                                    const SinusoidConfig& cfg = {});

}  // namespace liveprint
