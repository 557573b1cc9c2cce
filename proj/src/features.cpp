#include "liveprint/features.hpp"

#include <algorithm>
#include <cmath>

#include "liveprint/error.hpp"

namespace liveprint {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "Q_OCL", "Q_E", "Q_LOQ", "Q_COF", "Q_MEAN", "Q_STD", "Q_LCS1", "Q_LCS2", "Q_A", "Q_VAR"};

void require_foreground(const SegmentationMask& mask) {
  if (mask.foreground_count() == 0) throw Error(ErrorCode::EmptyForeground, "mask has no foreground block");
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool usable_orientation(const SegmentationMask& mask, const OrientationField& field, BlockIndex b) {
  return mask.is_foreground(b) && !field.is_degenerate(b);
}

}  // namespace

std::string_view feature_name(Feature f) { return kNames[static_cast<int>(f)]; }
std::string_view feature_name(int index) { return kNames.at(static_cast<std::size_t>(index)); }

Feature parse_feature_name(std::string_view name) {
  for (int i = 0; i < kFeatureCount; ++i) {
    if (kNames[i] == name) return static_cast<Feature>(i);
  }
  throw Error(ErrorCode::BadFeatureName, "unknown feature '" + std::string(name) + "'");
}

void FeatureConfig::validate() const {
  if (block_size < 4) throw Error(ErrorCode::BadConfig, "block_size must be >= 4");
  gabor.validate();
  spectrum.validate();
  sinusoid.validate();
  if (!(cof_threshold > 0.0 && cof_threshold < std::numbers::pi / 2.0)) {
    throw Error(ErrorCode::BadConfig, "cof.threshold must be in (0, pi/2)");
  }
  if (!(amplitude_threshold >= 0.0)) throw Error(ErrorCode::BadConfig, "sinusoid.amplitude_threshold must be >= 0");
  if (!(variance_ratio >= 0.0)) throw Error(ErrorCode::BadConfig, "sinusoid.variance_ratio must be >= 0");
}

// Samples within half a quantization step of the threshold are not counted
// as lying on the wrong side.
constexpr double kQuantizationSlack = 0.5;

BlockClarity block_clarity(const SinusoidAnalysis& analysis) {
  const SinusoidFit& fit = analysis.fit;
  const XSignature& sig = analysis.signature;
  BlockClarity c;
  long ridge = 0, valley = 0, ridge_bright = 0, valley_dark = 0;
  for (int k = 0; k < sig.length; ++k) {
    const double m = fit.model(k);
    if (m == fit.mean_level) continue;
    const bool is_ridge = m < fit.mean_level;
    for (int j = 0; j < sig.width; ++j) {
      const double v = sig.sample(k, j);
      if (std::isnan(v)) continue;
      if (is_ridge) {
        ++ridge;
        if (v > fit.mean_level + kQuantizationSlack) ++ridge_bright;
      } else {
        ++valley;
        if (v < fit.mean_level - kQuantizationSlack) ++valley_dark;
      }
    }
  }
  if (ridge == 0 || valley == 0) {
    c.overlap = 1.0;
    return c;
  }
  c.alpha = static_cast<double>(ridge_bright) / static_cast<double>(ridge);
  c.beta = static_cast<double>(valley_dark) / static_cast<double>(valley);
  c.overlap = (c.alpha + c.beta) / 2.0;
  c.reliable = fit.valid;
  return c;
}

BlockModels analyze_blocks(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
                           const SinusoidConfig& cfg) {
  BlockModels models{mask.grid, std::vector<std::optional<BlockModel>>(mask.grid.count())};
  for (int i = 0; i < mask.grid.count(); ++i) {
    if (!mask.foreground[i]) continue;
    BlockModel model;
    try {
      const SinusoidAnalysis analysis = sinusoid_fit_block(img, mask.grid, mask.grid.index(i), field.theta[i], cfg);
      model.fit = analysis.fit;
      model.clarity = block_clarity(analysis);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateBlock) throw;
    }
    models.blocks[i] = model;
  }
  return models;
}

std::vector<std::optional<double>> ocl_block_map(const GradientField& gradients, const SegmentationMask& mask) {
  std::vector<std::optional<double>> map(mask.grid.count());
  for (int i = 0; i < mask.grid.count(); ++i) {
    if (!mask.foreground[i]) continue;
    const GradientCovariance c = gradient_covariance_block(gradients, mask.grid, mask.grid.index(i));
    map[i] = c.lambda_max > 0.0 ? 1.0 - c.lambda_min / c.lambda_max : 0.0;
  }
  return map;
}

std::vector<std::optional<double>> loq_block_map(const SegmentationMask& mask, const OrientationField& field) {
  const BlockGrid& g = mask.grid;
  std::vector<std::optional<double>> map(g.count());
  for (int i = 0; i < g.count(); ++i) {
    const BlockIndex b = g.index(i);
    if (!usable_orientation(mask, field, b)) continue;
    double sum = 0.0;
    int n = 0;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const BlockIndex nb{b.bx + dx, b.by + dy};
        if ((dx == 0 && dy == 0) || !g.contains(nb) || !usable_orientation(mask, field, nb)) continue;
        sum += angle_difference(field.at(b), field.at(nb));
        ++n;
      }
    }
    if (n > 0) map[i] = sum / n;
  }
  return map;
}

double q_ocl(const GrayImage& img, const SegmentationMask& mask, const OrientationField&, const FeatureConfig&) {
  require_foreground(mask);
  const auto map = ocl_block_map(compute_gradients(img), mask);
  const BlockGrid& g = mask.grid;
  std::vector<double> dist(g.count(), 0.0);
  double mean_dist = 0.0;
  int n = 0;
  for (int i = 0; i < g.count(); ++i) {
    if (!map[i]) continue;
    const BlockIndex b = g.index(i);
    dist[i] = std::hypot(g.center_x(b) - mask.centroid->x, g.center_y(b) - mask.centroid->y);
    mean_dist += dist[i];
    ++n;
  }
  mean_dist /= n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.count(); ++i) {
    if (!map[i]) continue;
    const double w = mean_dist > 0.0 ? std::exp(-dist[i] * dist[i] / (2.0 * mean_dist * mean_dist)) : 1.0;
    num += w * *map[i];
    den += w;
  }
  return clamp01(num / den);
}

double q_e(const GrayImage& img, const SegmentationMask& mask, const OrientationField&, const FeatureConfig& cfg) {
  require_foreground(mask);
  const SpectralProfile p = power_spectrum_profile(img, mask, cfg.spectrum);
  return clamp01(1.0 - p.entropy / std::log(static_cast<double>(cfg.spectrum.rings)));
}

double q_loq(const GrayImage&, const SegmentationMask& mask, const OrientationField& field, const FeatureConfig&) {
  require_foreground(mask);
  const auto map = loq_block_map(mask, field);
  double sum = 0.0;
  int n = 0;
  for (const auto& d : map) {
    if (!d) continue;
    sum += 1.0 - *d / (std::numbers::pi / 2.0);
    ++n;
  }
  return n > 0 ? clamp01(sum / n) : 1.0;
}

double q_cof(const GrayImage&, const SegmentationMask& mask, const OrientationField& field, const FeatureConfig& cfg) {
  require_foreground(mask);
  const BlockGrid& g = mask.grid;
  long pairs = 0, abrupt = 0;
  auto visit = [&](BlockIndex a, BlockIndex b) {
    if (!g.contains(b) || !usable_orientation(mask, field, a) || !usable_orientation(mask, field, b)) return;
    ++pairs;
    if (angle_difference(field.at(a), field.at(b)) > cfg.cof_threshold) ++abrupt;
  };
  for (int by = 0; by < g.ny; ++by) {
    for (int bx = 0; bx < g.nx; ++bx) {
      visit({bx, by}, {bx + 1, by});
      visit({bx, by}, {bx, by + 1});
    }
  }
  return pairs > 0 ? 1.0 - static_cast<double>(abrupt) / static_cast<double>(pairs) : 1.0;
}

namespace {

struct GrayMoments {
  double mean = 0.0;
  double stddev = 0.0;
};

GrayMoments foreground_moments(const GrayImage& img, const SegmentationMask& mask) {
  require_foreground(mask);
  long long sum = 0, sum_sq = 0, n = 0;
  for (int i = 0; i < mask.grid.count(); ++i) {
    if (!mask.foreground[i]) continue;
    const PixelRect r = mask.grid.rect(mask.grid.index(i));
    for (int y = r.y0; y < r.y0 + r.size; ++y) {
      for (int x = r.x0; x < r.x0 + r.size; ++x) {
        const long long v = img.at(x, y);
        sum += v;
        sum_sq += v * v;
        ++n;
      }
    }
  }
  // Integer sums keep the variance exact before scaling to unit gray.
  const double nn = static_cast<double>(n);
  const double var = (static_cast<double>(sum_sq) * nn - static_cast<double>(sum) * static_cast<double>(sum)) / (nn * nn);
  return {static_cast<double>(sum) / nn / 255.0, std::sqrt(std::max(0.0, var)) / 255.0};
}

}  // namespace

double q_mean(const GrayImage& img, const SegmentationMask& mask, const OrientationField&, const FeatureConfig&) {
  return clamp01(foreground_moments(img, mask).mean);
}

double q_std(const GrayImage& img, const SegmentationMask& mask, const OrientationField&, const FeatureConfig&) {
  return clamp01(2.0 * foreground_moments(img, mask).stddev);
}

double q_lcs1(const BlockModels& models) {
  double sum = 0.0;
  int n = 0;
  for (const auto& m : models.blocks) {
    if (!m || !m->clarity || !m->clarity->reliable) continue;
    sum += m->clarity->overlap;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::NoReliableBlocks, "no block has a reliable sinusoid model");
  return clamp01(1.0 - sum / n);
}

double q_lcs2(const BlockModels& models) {
  double sum = 0.0;
  int n = 0;
  for (const auto& m : models.blocks) {
    if (!m) continue;
    sum += (m->clarity && m->clarity->reliable) ? m->clarity->overlap : 1.0;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::EmptyForeground, "mask has no foreground block");
  return clamp01(1.0 - sum / n);
}

namespace {

template <typename Pred>
double good_block_fraction(const BlockModels& models, Pred good) {
  int n = 0, good_count = 0;
  for (const auto& m : models.blocks) {
    if (!m) continue;
    ++n;
    if (m->fit && m->fit->valid && good(*m->fit)) ++good_count;
  }
  if (n == 0) throw Error(ErrorCode::EmptyForeground, "mask has no foreground block");
  return static_cast<double>(good_count) / n;
}

}  // namespace

double q_a(const BlockModels& models, const FeatureConfig& cfg) {
  return good_block_fraction(models,
                             [&](const SinusoidFit& f) { return f.amplitude / 255.0 >= cfg.amplitude_threshold; });
}

double q_var(const BlockModels& models, const FeatureConfig& cfg) {
  return good_block_fraction(
      models, [&](const SinusoidFit& f) { return f.residual_variance <= cfg.variance_ratio * f.block_variance; });
}

double q_lcs1(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
              const FeatureConfig& cfg) {
  require_foreground(mask);
  return q_lcs1(analyze_blocks(img, mask, field, cfg.sinusoid));
}

double q_lcs2(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
              const FeatureConfig& cfg) {
  require_foreground(mask);
  return q_lcs2(analyze_blocks(img, mask, field, cfg.sinusoid));
}

double q_a(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field, const FeatureConfig& cfg) {
  require_foreground(mask);
  return q_a(analyze_blocks(img, mask, field, cfg.sinusoid), cfg);
}

double q_var(const GrayImage& img, const SegmentationMask& mask, const OrientationField& field,
             const FeatureConfig& cfg) {
  require_foreground(mask);
  return q_var(analyze_blocks(img, mask, field, cfg.sinusoid), cfg);
}

Extraction extract_all(const GrayImage& img, const FeatureConfig& cfg) {
  cfg.validate();
  const SegmentationMask mask = segment(img, cfg.gabor, cfg.block_size);
  const OrientationField field = orientation_field(img, mask.grid);
  const BlockModels models = analyze_blocks(img, mask, field, cfg.sinusoid);

  Extraction out;
  FeatureVector& v = out.features;
  v[Feature::Ocl] = q_ocl(img, mask, field, cfg);
  v[Feature::E] = q_e(img, mask, field, cfg);
  v[Feature::Loq] = q_loq(img, mask, field, cfg);
  v[Feature::Cof] = q_cof(img, mask, field, cfg);
  v[Feature::Mean] = q_mean(img, mask, field, cfg);
  v[Feature::Std] = q_std(img, mask, field, cfg);
  v[Feature::Lcs2] = q_lcs2(models);
  try {
    v[Feature::Lcs1] = q_lcs1(models);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoReliableBlocks) throw;
    v[Feature::Lcs1] = v[Feature::Lcs2];
    out.lcs1_fallback = true;
  }
  v[Feature::A] = q_a(models, cfg);
  v[Feature::Var] = q_var(models, cfg);
  return out;
}

}  // namespace liveprint
