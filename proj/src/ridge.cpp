#include "liveprint/ridge.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include "liveprint/error.hpp"

namespace liveprint {

namespace {
constexpr double kPi = std::numbers::pi;

// Guards FFTW plan creation and destruction, which are not re-entrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

GradientField compute_gradients(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  if (w < 3 || h < 3) throw Error(ErrorCode::ImageTooSmall, "gradients need at least 3x3 pixels");
  GradientField g{w, h, std::vector<double>(static_cast<std::size_t>(w) * h),
                  std::vector<double>(static_cast<std::size_t>(w) * h)};
  auto px = [&](int x, int y) { return img.unit(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)); };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double tl = px(x - 1, y - 1), tc = px(x, y - 1), tr = px(x + 1, y - 1);
      const double ml = px(x - 1, y), mr = px(x + 1, y);
      const double bl = px(x - 1, y + 1), bc = px(x, y + 1), br = px(x + 1, y + 1);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      g.gx[i] = ((tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl)) / 8.0;
      g.gy[i] = ((bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr)) / 8.0;
    }
  }
  return g;
}

OrientationField orientation_field(const GradientField& gradients, const BlockGrid& grid) {
  OrientationField field{grid, std::vector<double>(grid.count(), 0.0), std::vector<std::uint8_t>(grid.count(), 0)};
  for (int i = 0; i < grid.count(); ++i) {
    const PixelRect r = grid.rect(grid.index(i));
    double sxy = 0.0, sxx_yy = 0.0, energy = 0.0;
    for (int y = r.y0; y < r.y0 + r.size; ++y) {
      for (int x = r.x0; x < r.x0 + r.size; ++x) {
        const double gx = gradients.x(x, y);
        const double gy = gradients.y(x, y);
        sxy += 2.0 * gx * gy;
        sxx_yy += gx * gx - gy * gy;
        energy += gx * gx + gy * gy;
      }
    }
    if (energy <= 0.0) {
      field.degenerate[i] = 1;
      continue;
    }
    double theta = 0.5 * std::atan2(sxy, sxx_yy) + kPi / 2.0;
    theta = std::fmod(theta, kPi);
    if (theta < 0.0) theta += kPi;
    if (theta >= kPi) theta = 0.0;
    field.theta[i] = theta;
  }
  return field;
}

OrientationField orientation_field(const GrayImage& img, const BlockGrid& grid) {
  return orientation_field(compute_gradients(img), grid);
}

double angle_difference(double a, double b) {
  double d = std::fmod(std::abs(a - b), kPi);
  return std::min(d, kPi - d);
}

GradientCovariance covariance_from_moments(double jxx, double jxy, double jyy) {
  GradientCovariance c{jxx, jxy, jyy, 0.0, 0.0};
  const double trace = jxx + jyy;
  const double det = jxx * jyy - jxy * jxy;
  const double disc = std::hypot(jxx - jyy, 2.0 * jxy);
  c.lambda_max = 0.5 * (trace + disc);
  // The product form avoids cancellation in the smaller root.
  c.lambda_min = c.lambda_max > 0.0 ? std::max(0.0, det / c.lambda_max) : 0.0;
  return c;
}

GradientCovariance gradient_covariance_block(const GradientField& gradients, const BlockGrid& grid, BlockIndex block) {
  const PixelRect r = grid.rect(block);
  double jxx = 0.0, jxy = 0.0, jyy = 0.0;
  for (int y = r.y0; y < r.y0 + r.size; ++y) {
    for (int x = r.x0; x < r.x0 + r.size; ++x) {
      const double gx = gradients.x(x, y);
      const double gy = gradients.y(x, y);
      jxx += gx * gx;
      jxy += gx * gy;
      jyy += gy * gy;
    }
  }
  return covariance_from_moments(jxx, jxy, jyy);
}

void SpectrumConfig::validate() const {
  if (rings < 2) throw Error(ErrorCode::BadConfig, "spectrum.rings must be >= 2");
  if (!(f_lo > 0.0 && f_lo < f_hi && f_hi <= 0.5)) {
    throw Error(ErrorCode::BadConfig, "spectrum band must satisfy 0 < f_lo < f_hi <= 0.5");
  }
}

double radial_frequency(int u, int v, int width, int height) {
  const double fu = (u <= width / 2 ? u : u - width) / static_cast<double>(width);
  const double fv = (v <= height / 2 ? v : v - height) / static_cast<double>(height);
  return std::hypot(fu, fv);
}

PowerSpectrum power_spectrum(const GrayImage& img, const SegmentationMask& mask) {
  const int w = img.width();
  const int h = img.height();
  const BlockGrid& grid = mask.grid;

  double sum = 0.0;
  long count = 0;
  for (int i = 0; i < grid.count(); ++i) {
    if (!mask.foreground[i]) continue;
    const PixelRect r = grid.rect(grid.index(i));
    for (int y = r.y0; y < r.y0 + r.size; ++y) {
      for (int x = r.x0; x < r.x0 + r.size; ++x) sum += img.unit(x, y);
    }
    count += static_cast<long>(r.size) * r.size;
  }
  const double mean = count > 0 ? sum / static_cast<double>(count) : 0.0;

  const int hw = w / 2 + 1;
  double* in = fftw_alloc_real(static_cast<std::size_t>(w) * h);
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(h) * hw);
  std::fill(in, in + static_cast<std::size_t>(w) * h, 0.0);
  for (int i = 0; i < grid.count(); ++i) {
    if (!mask.foreground[i]) continue;
    const PixelRect r = grid.rect(grid.index(i));
    for (int y = r.y0; y < r.y0 + r.size; ++y) {
      for (int x = r.x0; x < r.x0 + r.size; ++x) in[static_cast<std::size_t>(y) * w + x] = img.unit(x, y) - mean;
    }
  }

  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_2d(h, w, in, out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);

  PowerSpectrum spec{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < hw; ++u) {
      const fftw_complex& c = out[static_cast<std::size_t>(v) * hw + u];
      const double p = c[0] * c[0] + c[1] * c[1];
      spec.power[static_cast<std::size_t>(v) * w + u] = p;
      // Real input: F(-u, -v) = conj(F(u, v)).
      const int mu = (w - u) % w;
      const int mv = (h - v) % h;
      spec.power[static_cast<std::size_t>(mv) * w + mu] = p;
    }
  }

  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return spec;
}

SpectralProfile ring_profile(const PowerSpectrum& spectrum, const SpectrumConfig& cfg) {
  cfg.validate();
  SpectralProfile profile;
  profile.ring_energies.assign(cfg.rings, 0.0);
  const double width = (cfg.f_hi - cfg.f_lo) / cfg.rings;
  for (int k = 0; k < cfg.rings; ++k) profile.ring_centers.push_back(cfg.f_lo + (k + 0.5) * width);

  for (int v = 0; v < spectrum.height; ++v) {
    for (int u = 0; u < spectrum.width; ++u) {
      const double f = radial_frequency(u, v, spectrum.width, spectrum.height);
      if (f < cfg.f_lo || f > cfg.f_hi) continue;
      const int k = std::min(cfg.rings - 1, static_cast<int>((f - cfg.f_lo) / width));
      profile.ring_energies[k] += spectrum.at(u, v);
    }
  }
  double total = 0.0;
  for (double e : profile.ring_energies) total += e;
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroEnergy, "no spectral energy inside the ring band");
  for (double& e : profile.ring_energies) {
    e /= total;
    if (e > 0.0) profile.entropy -= e * std::log(e);
  }
  return profile;
}

SpectralProfile power_spectrum_profile(const GrayImage& img, const SegmentationMask& mask, const SpectrumConfig& cfg) {
  return ring_profile(power_spectrum(img, mask), cfg);
}

void SinusoidConfig::validate() const {
  if (window_length < 4 || window_width < 1) throw Error(ErrorCode::BadConfig, "sinusoid window too small");
  if (!(min_period > 0.0 && min_period <= max_period)) throw Error(ErrorCode::BadConfig, "bad sinusoid period window");
  if (!(min_amplitude >= 0.0)) throw Error(ErrorCode::BadConfig, "sinusoid.min_amplitude must be >= 0");
}

double SinusoidFit::model(double k) const {
  const double w = 2.0 * kPi / period;
  return mean_level + cos_coef * std::cos(w * k) + sin_coef * std::sin(w * k);
}

namespace {

double bilinear(const GrayImage& img, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = std::min(static_cast<int>(x), img.width() - 2 < 0 ? 0 : img.width() - 2);
  const int y0 = std::min(static_cast<int>(y), img.height() - 2 < 0 ? 0 : img.height() - 2);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
  const double bottom = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

struct Extremum {
  double position;
  double value;
};

// Local extrema on the correct side of the signature mean; maxima when
// sign = +1, minima when sign = -1. Positions are refined by a parabola
// through the three neighboring samples.
std::vector<Extremum> find_extrema(const std::vector<double>& s, double mean, double sign) {
  std::vector<Extremum> out;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    const double a = sign * s[k - 1];
    const double b = sign * s[k];
    const double c = sign * s[k + 1];
    if (!(b > a && b >= c) || !(sign * (s[k] - mean) > 0.0)) continue;
    const double denom = a - 2.0 * b + c;
    const double offset = denom != 0.0 ? 0.5 * (a - c) / denom : 0.0;
    out.push_back({static_cast<double>(k) + std::clamp(offset, -0.5, 0.5), s[k]});
  }
  return out;
}

}  // namespace

XSignature extract_signature(const GrayImage& img, const BlockGrid& grid, BlockIndex block, double theta,
                             const SinusoidConfig& cfg) {
  cfg.validate();
  const double cx = grid.center_x(block);
  const double cy = grid.center_y(block);
  const double dx = std::cos(theta), dy = std::sin(theta);  // along ridges
  const double nx = -dy, ny = dx;                           // across ridges
  const double max_x = img.width() - 1 + 1e-9;
  const double max_y = img.height() - 1 + 1e-9;

  // Rows that fall completely outside the image are trimmed; samples outside
  // the image inside a kept row are NaN.
  std::vector<double> samples(static_cast<std::size_t>(cfg.window_length) * cfg.window_width);
  std::vector<double> row_mean(cfg.window_length, 0.0);
  std::vector<int> row_count(cfg.window_length, 0);
  for (int k = 0; k < cfg.window_length; ++k) {
    const double t = k - (cfg.window_length - 1) / 2.0;
    for (int j = 0; j < cfg.window_width; ++j) {
      const double s = j - (cfg.window_width - 1) / 2.0;
      const double x = cx + t * nx + s * dx;
      const double y = cy + t * ny + s * dy;
      double v = std::numeric_limits<double>::quiet_NaN();
      if (x >= -1e-9 && y >= -1e-9 && x <= max_x && y <= max_y) {
        v = bilinear(img, x, y);
        row_mean[k] += v;
        ++row_count[k];
      }
      samples[static_cast<std::size_t>(k) * cfg.window_width + j] = v;
    }
  }
  int first = 0;
  int last = cfg.window_length;
  while (first < last && row_count[first] == 0) ++first;
  while (last > first && row_count[last - 1] == 0) --last;

  XSignature sig;
  sig.length = last - first;
  sig.width = cfg.window_width;
  sig.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(first) * sig.width,
                     samples.begin() + static_cast<std::ptrdiff_t>(last) * sig.width);
  for (int k = first; k < last; ++k) sig.signature.push_back(row_count[k] > 0 ? row_mean[k] / row_count[k] : 0.0);
  return sig;
}

SinusoidFit fit_signature(const XSignature& sig, const SinusoidConfig& cfg) {
  const auto& s = sig.signature;
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());

  const auto peaks = find_extrema(s, mean, 1.0);
  const auto valleys = find_extrema(s, mean, -1.0);
  if (peaks.size() < 2 || valleys.empty()) {
    throw Error(ErrorCode::DegenerateBlock, "x-signature has " + std::to_string(peaks.size()) + " peaks");
  }

  SinusoidFit fit;
  fit.period = (peaks.back().position - peaks.front().position) / static_cast<double>(peaks.size() - 1);
  double peak_mean = 0.0, valley_mean = 0.0;
  for (const auto& p : peaks) peak_mean += p.value;
  for (const auto& v : valleys) valley_mean += v.value;
  peak_mean /= static_cast<double>(peaks.size());
  valley_mean /= static_cast<double>(valleys.size());
  fit.amplitude = (peak_mean - valley_mean) / 2.0;

  // Least-squares mean level and phase at the estimated period.
  const double w = 2.0 * kPi / fit.period;
  Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Eigen::Vector3d basis(1.0, std::cos(w * k), std::sin(w * k));
    normal += basis * basis.transpose();
    rhs += basis * s[k];
  }
  const Eigen::Vector3d coef = normal.ldlt().solve(rhs);
  fit.mean_level = coef[0];
  fit.cos_coef = coef[1];
  fit.sin_coef = coef[2];

  double ss = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double r = s[k] - fit.model(static_cast<double>(k));
    ss += r * r;
  }
  fit.residual_variance = ss / static_cast<double>(s.size());
  fit.valid = fit.period >= cfg.min_period && fit.period <= cfg.max_period && fit.amplitude >= cfg.min_amplitude;
  return fit;
}

SinusoidAnalysis sinusoid_fit_block(const GrayImage& img, const BlockGrid& grid, BlockIndex block, double theta,
                                    const SinusoidConfig& cfg) {
  SinusoidAnalysis out{{}, extract_signature(img, grid, block, theta, cfg)};
  out.fit = fit_signature(out.signature, cfg);

  const PixelRect r = grid.rect(block);
  double sum = 0.0, sum_sq = 0.0;
  for (int y = r.y0; y < r.y0 + r.size; ++y) {
    for (int x = r.x0; x < r.x0 + r.size; ++x) {
      const double v = img.at(x, y);
      sum += v;
      sum_sq += v * v;
    }
  }
  const double n = static_cast<double>(r.size) * r.size;
  out.fit.block_variance = std::max(0.0, sum_sq / n - (sum / n) * (sum / n));
  return out;
}

}  // namespace liveprint
