#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "liveprint/image.hpp"
#include "liveprint/ridge.hpp"
#include "liveprint/segmentation.hpp"

namespace liveprint {

inline constexpr int kFeatureCount = 10;

/// The ten quality measures, in their canonical column order.
enum class Feature : int { Ocl = 0, E, Loq, Cof, Mean, Std, Lcs1, Lcs2, A, Var };

std::string_view feature_name(Feature f);
std::string_view feature_name(int index);
/// Accepts "Q_OCL", "Q_E", ... ; throws BadFeatureName.
Feature parse_feature_name(std::string_view name);

/// Quality measures of one image, each in [0,1] with higher meaning better.
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double operator[](Feature f) const { return values[static_cast<int>(f)]; }
  double& operator[](Feature f) { return values[static_cast<int>(f)]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct FeatureConfig {
  int block_size = 16;
  GaborBankConfig gabor;
  SpectrumConfig spectrum;
  SinusoidConfig sinusoid;
  double cof_threshold = std::numbers::pi / 8.0;  // radians
  double amplitude_threshold = 8.0 / 255.0;       // unit gray
  double variance_ratio = 0.5;

  void validate() const;
};

/// Per-block ridge/valley separation from the fitted sinusoid. Ridges are the
/// dark half-period of the model.
struct BlockClarity {
  double alpha = 0.0;    // ridge samples on the bright side of the model mean
  double beta = 0.0;     // valley samples on the dark side of the model mean
  double overlap = 0.0;  // (alpha + beta) / 2
  bool reliable = false;
};

BlockClarity block_clarity(const SinusoidAnalysis& analysis);

/// Sinusoid model and clarity for one foreground block; both absent when the
/// block's signature is degenerate.
struct BlockModel {
  std::optional<SinusoidFit> fit;
  std::optional<BlockClarity> clarity;
};

struct BlockModels {
  BlockGrid grid;
  std::vector<std::optional<BlockModel>> blocks;  // engaged for foreground blocks only
};

BlockModels analyze_blocks(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
                           const SinusoidConfig& cfg = {});

/// Block-wise orientation certainty, engaged for foreground blocks.
std::vector<std::optional<double>> ocl_block_map(const GradientField& gradients, const SegmentationMask& mask);
/// Block-wise mean orientation difference to foreground neighbors (radians).
std::vector<std::optional<double>> loq_block_map(const SegmentationMask& mask, const OrientationField& field);

double q_ocl(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
             const FeatureConfig& cfg = {});
double q_e(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
           const FeatureConfig& cfg = {});
double q_loq(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
             const FeatureConfig& cfg = {});
double q_cof(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
             const FeatureConfig& cfg = {});
double q_mean(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
              const FeatureConfig& cfg = {});
double q_std(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
             const FeatureConfig& cfg = {});
double q_lcs1(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
              const FeatureConfig& cfg = {});
double q_lcs2(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
              const FeatureConfig& cfg = {});
double q_a(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
           const FeatureConfig& cfg = {});
double q_var(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
             const FeatureConfig& cfg = {});

// Variants over precomputed block models.
double q_lcs1(const BlockModels& models);
double q_lcs2(const BlockModels& models);
double q_a(const BlockModels& models, const FeatureConfig& cfg = {});
double q_var(const BlockModels& models, const FeatureConfig& cfg = {});

struct Extraction {
  FeatureVector features;
  bool lcs1_fallback = false;  // no reliable block; Q_LCS1 copied from Q_LCS2
};

/// Segmentation, orientation field and all ten measures for one image.
Extraction extract_all(const GrayImage& img, const FeatureConfig& cfg = {});

}  // namespace liveprint
