#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "liveprint/image.hpp"

namespace liveprint {

struct GaborBankConfig {
  int n_orientations = 8;   // evenly spaced in [0, pi)
  double frequency = 0.1;   // cycles per pixel
  double sigma = 4.0;       // isotropic envelope, pixels
  double threshold = 0.01;  // on unit-normalized gray

  void validate() const;
};

struct PointD {
  double x = 0.0;
  double y = 0.0;
};

struct SegmentationMask {
  BlockGrid grid;
  std::vector<std::uint8_t> foreground;  // one flag per block, row-major
  std::optional<PointD> centroid;        // mean foreground block center

  bool is_foreground(BlockIndex b) const { return grid.contains(b) && foreground[grid.linear(b)] != 0; }
  int foreground_count() const;
};

/// Builds a mask from per-block flags and fills in the centroid.
SegmentationMask make_mask(const BlockGrid& grid, std::vector<std::uint8_t> flags);

/// Standard deviation across the bank's mean absolute responses for one
/// block. Computed directly on the block's local window (block plus 3 sigma,
/// clamped to the image, zero outside) after removing the block mean.
double gabor_block_feature(const GrayImage& img, const BlockGrid& grid, BlockIndex block,
                           const GaborBankConfig& cfg = {});

/// The same feature for every block of the grid, using separable filtering
/// over the whole image. Row-major, one value per block.
std::vector<double> gabor_feature_map(const GrayImage& img, const BlockGrid& grid, const GaborBankConfig& cfg = {});

/// Thresholds a feature map. Throws EmptyForeground if no block passes.
SegmentationMask segment_from_features(const BlockGrid& grid, const std::vector<double>& features, double threshold);

SegmentationMask segment(const GrayImage& img, const GaborBankConfig& cfg = {}, int block_size = 16);

/// Debug export: one pixel per block, foreground 255, background 0.
GrayImage mask_image(const SegmentationMask& mask);

}  // namespace liveprint
