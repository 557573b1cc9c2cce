#include "liveprint/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "liveprint/error.hpp"

namespace liveprint {

void GaborBankConfig::validate() const {
  if (n_orientations < 2) throw Error(ErrorCode::BadConfig, "gabor.orientations must be >= 2");
  if (!(frequency > 0.0 && frequency < 0.5)) throw Error(ErrorCode::BadConfig, "gabor.frequency must be in (0, 0.5)");
  if (!(sigma > 0.0)) throw Error(ErrorCode::BadConfig, "gabor.sigma must be > 0");
  if (!(threshold >= 0.0)) throw Error(ErrorCode::BadConfig, "gabor.threshold must be >= 0");
}

int SegmentationMask::foreground_count() const {
  return static_cast<int>(std::count_if(foreground.begin(), foreground.end(), [](std::uint8_t f) { return f != 0; }));
}

SegmentationMask make_mask(const BlockGrid& grid, std::vector<std::uint8_t> flags) {
  SegmentationMask mask{grid, std::move(flags), std::nullopt};
  double sx = 0.0;
  double sy = 0.0;
  int n = 0;
  for (int i = 0; i < grid.count(); ++i) {
    if (!mask.foreground[i]) continue;
    const BlockIndex b = grid.index(i);
    sx += grid.center_x(b);
    sy += grid.center_y(b);
    ++n;
  }
  if (n > 0) mask.centroid = PointD{sx / n, sy / n};
  return mask;
}

namespace {

// Even-symmetric Gabor filters with an isotropic envelope, split into
// separable cosine and sine parts: cos(a*dx + b*dy) = cos(a*dx)cos(b*dy) - sin(a*dx)sin(b*dy).
struct GaborFilter {
  std::vector<double> cx, sx, cy, sy;  // taps indexed by d + radius
  double inv_norm = 1.0;               // scales the kernel to unit L2 norm
};

struct GaborBank {
  int radius = 0;
  std::vector<GaborFilter> filters;

  double tap(const GaborFilter& f, int dx, int dy) const {
    return (f.cx[dx + radius] * f.cy[dy + radius] - f.sx[dx + radius] * f.sy[dy + radius]) * f.inv_norm;
  }
};

GaborBank make_bank(const GaborBankConfig& cfg) {
  cfg.validate();
  GaborBank bank;
  bank.radius = static_cast<int>(std::ceil(3.0 * cfg.sigma));
  const int r = bank.radius;
  const int taps = 2 * r + 1;
  for (int o = 0; o < cfg.n_orientations; ++o) {
    const double theta = std::numbers::pi * o / cfg.n_orientations;
    const double a = 2.0 * std::numbers::pi * cfg.frequency * std::cos(theta);
    const double b = 2.0 * std::numbers::pi * cfg.frequency * std::sin(theta);
    GaborFilter f;
    f.cx.resize(taps);
    f.sx.resize(taps);
    f.cy.resize(taps);
    f.sy.resize(taps);
    for (int d = -r; d <= r; ++d) {
      const double env = std::exp(-d * d / (2.0 * cfg.sigma * cfg.sigma));
      f.cx[d + r] = env * std::cos(a * d);
      f.sx[d + r] = env * std::sin(a * d);
      f.cy[d + r] = env * std::cos(b * d);
      f.sy[d + r] = env * std::sin(b * d);
    }
    double energy = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const double g = f.cx[dx + r] * f.cy[dy + r] - f.sx[dx + r] * f.sy[dy + r];
        energy += g * g;
      }
    }
    f.inv_norm = 1.0 / std::sqrt(energy);
    bank.filters.push_back(std::move(f));
  }
  return bank;
}

double block_mean(const GrayImage& img, const PixelRect& rect) {
  long sum = 0;
  for (int y = rect.y0; y < rect.y0 + rect.size; ++y) {
    for (int x = rect.x0; x < rect.x0 + rect.size; ++x) sum += img.at(x, y);
  }
  return sum / (255.0 * rect.size * rect.size);
}

double population_std(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

double gabor_block_feature(const GrayImage& img, const BlockGrid& grid, BlockIndex block, const GaborBankConfig& cfg) {
  if (!grid.contains(block)) throw Error(ErrorCode::BadSpec, "block outside grid");
  const GaborBank bank = make_bank(cfg);
  const int r = bank.radius;
  const PixelRect rect = grid.rect(block);
  const double mean = block_mean(img, rect);

  const int wx0 = std::max(0, rect.x0 - r);
  const int wy0 = std::max(0, rect.y0 - r);
  const int wx1 = std::min(img.width(), rect.x0 + rect.size + r);
  const int wy1 = std::min(img.height(), rect.y0 + rect.size + r);
  auto window = [&](int x, int y) {
    if (x < wx0 || y < wy0 || x >= wx1 || y >= wy1) return 0.0;
    return img.unit(x, y) - mean;
  };

  std::vector<double> magnitudes;
  magnitudes.reserve(bank.filters.size());
  for (const auto& f : bank.filters) {
    double sum_abs = 0.0;
    for (int y = rect.y0; y < rect.y0 + rect.size; ++y) {
      for (int x = rect.x0; x < rect.x0 + rect.size; ++x) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) acc += bank.tap(f, dx, dy) * window(x + dx, y + dy);
        }
        sum_abs += std::abs(acc);
      }
    }
    magnitudes.push_back(sum_abs / (rect.size * rect.size));
  }
  return population_std(magnitudes);
}

std::vector<double> gabor_feature_map(const GrayImage& img, const BlockGrid& grid, const GaborBankConfig& cfg) {
  const GaborBank bank = make_bank(cfg);
  const int r = bank.radius;
  const int bs = grid.block_size;
  const int out_w = grid.nx * bs;
  const int out_h = grid.ny * bs;
  const int width = img.width();
  const int height = img.height();
  // Rows needed by the vertical pass.
  const int row0 = std::max(0, -r);
  const int row1 = std::min(height, out_h + r);
  const int rows = row1 - row0;

  std::vector<double> unit(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) unit[static_cast<std::size_t>(y) * width + x] = img.unit(x, y);
  }

  std::vector<double> block_means(grid.count());
  for (int i = 0; i < grid.count(); ++i) block_means[i] = block_mean(img, grid.rect(grid.index(i)));

  std::vector<std::vector<double>> sum_abs(bank.filters.size(), std::vector<double>(grid.count(), 0.0));
  std::vector<double> hc(static_cast<std::size_t>(rows) * out_w);
  std::vector<double> hs(static_cast<std::size_t>(rows) * out_w);
  std::vector<double> resp(out_w);

  for (std::size_t o = 0; o < bank.filters.size(); ++o) {
    const GaborFilter& f = bank.filters[o];

    // Horizontal pass with zero padding outside the image.
    for (int y = row0; y < row1; ++y) {
      const double* src = &unit[static_cast<std::size_t>(y) * width];
      double* dc = &hc[static_cast<std::size_t>(y - row0) * out_w];
      double* ds = &hs[static_cast<std::size_t>(y - row0) * out_w];
      for (int x = 0; x < out_w; ++x) {
        const int d0 = std::max(-r, -x);
        const int d1 = std::min(r, width - 1 - x);
        double c = 0.0;
        double s = 0.0;
        for (int d = d0; d <= d1; ++d) {
          c += f.cx[d + r] * src[x + d];
          s += f.sx[d + r] * src[x + d];
        }
        dc[x] = c;
        ds[x] = s;
      }
    }

    // Response of the filter to a unit constant over the image support, used
    // to subtract each block's mean without re-filtering.
    std::vector<double> col_c(out_w), col_s(out_w);
    for (int x = 0; x < out_w; ++x) {
      const int d0 = std::max(-r, -x);
      const int d1 = std::min(r, width - 1 - x);
      for (int d = d0; d <= d1; ++d) {
        col_c[x] += f.cx[d + r];
        col_s[x] += f.sx[d + r];
      }
    }

    for (int y = 0; y < out_h; ++y) {
      const int d0 = std::max(-r, -y);
      const int d1 = std::min(r, height - 1 - y);
      std::fill(resp.begin(), resp.end(), 0.0);
      double row_c = 0.0;
      double row_s = 0.0;
      for (int d = d0; d <= d1; ++d) {
        const double wc = f.cy[d + r];
        const double ws = f.sy[d + r];
        row_c += wc;
        row_s += ws;
        const double* lc = &hc[static_cast<std::size_t>(y + d - row0) * out_w];
        const double* ls = &hs[static_cast<std::size_t>(y + d - row0) * out_w];
        for (int x = 0; x < out_w; ++x) resp[x] += wc * lc[x] - ws * ls[x];
      }
      const int by = y / bs;
      for (int x = 0; x < out_w; ++x) {
        const int block = by * grid.nx + x / bs;
        const double constant = col_c[x] * row_c - col_s[x] * row_s;
        sum_abs[o][block] += std::abs((resp[x] - block_means[block] * constant) * f.inv_norm);
      }
    }
  }

  std::vector<double> features(grid.count());
  std::vector<double> magnitudes(bank.filters.size());
  const double area = static_cast<double>(bs) * bs;
  for (int i = 0; i < grid.count(); ++i) {
    for (std::size_t o = 0; o < bank.filters.size(); ++o) magnitudes[o] = sum_abs[o][i] / area;
    features[i] = population_std(magnitudes);
  }
  return features;
}

SegmentationMask segment_from_features(const BlockGrid& grid, const std::vector<double>& features, double threshold) {
  std::vector<std::uint8_t> flags(grid.count(), 0);
  for (int i = 0; i < grid.count(); ++i) flags[i] = features[i] >= threshold ? 1 : 0;
  SegmentationMask mask = make_mask(grid, std::move(flags));
  if (!mask.centroid) throw Error(ErrorCode::EmptyForeground, "no block passed the Gabor threshold");
  return mask;
}

SegmentationMask segment(const GrayImage& img, const GaborBankConfig& cfg, int block_size) {
  const BlockGrid grid = block_partition(img, block_size);
  return segment_from_features(grid, gabor_feature_map(img, grid, cfg), cfg.threshold);
}

GrayImage mask_image(const SegmentationMask& mask) {
  GrayImage out(mask.grid.nx, mask.grid.ny, 0);
  for (int i = 0; i < mask.grid.count(); ++i) {
    const BlockIndex b = mask.grid.index(i);
    out.at(b.bx, b.by) = mask.foreground[i] ? 255 : 0;
  }
  return out;
}

}  // namespace liveprint
