#pragma once

// Slow, straightforward reference computations used as test oracles. None of
// these share code with the library.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "liveprint/image.hpp"

namespace oracle {

constexpr double kPi = std::numbers::pi;

// Direct O(N^2) 2-D DFT power |F(u,v)|^2 of a real field (row-major, w*h).
inline std::vector<double> dft_power(const std::vector<double>& f, int w, int h) {
  std::vector<double> power(static_cast<std::size_t>(w) * h);
  // Separable but still direct: rows first, then columns, each a plain sum.
  std::vector<std::complex<double>> rows(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int u = 0; u < w; ++u) {
      std::complex<double> acc = 0.0;
      for (int x = 0; x < w; ++x) acc += f[y * w + x] * std::polar(1.0, -2.0 * kPi * u * x / w);
      rows[y * w + u] = acc;
    }
  }
  for (int u = 0; u < w; ++u) {
    for (int v = 0; v < h; ++v) {
      std::complex<double> acc = 0.0;
      for (int y = 0; y < h; ++y) acc += rows[y * w + u] * std::polar(1.0, -2.0 * kPi * v * y / h);
      power[v * w + u] = std::norm(acc);
    }
  }
  return power;
}

// Hard-ring energies of a DFT power array over [f_lo, f_hi] cycles/px.
inline std::vector<double> ring_energies(const std::vector<double>& power, int w, int h, int rings, double f_lo,
                                         double f_hi) {
  std::vector<double> e(rings, 0.0);
  const double width = (f_hi - f_lo) / rings;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const double fu = (u <= w / 2 ? u : u - w) / double(w);
      const double fv = (v <= h / 2 ? v : v - h) / double(h);
      const double f = std::sqrt(fu * fu + fv * fv);
      if (f < f_lo || f > f_hi) continue;
      int k = static_cast<int>((f - f_lo) / width);
      if (k >= rings) k = rings - 1;
      e[k] += power[v * w + u];
    }
  }
  double total = 0.0;
  for (double x : e) total += x;
  for (double& x : e) x /= total;
  return e;
}

inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

// Gabor bank feature of one block by full 2-D convolution with each of the
// explicitly built kernels.
inline double gabor_block_feature(const liveprint::GrayImage& img, int x0, int y0, int bs, int n_orient = 8,
                                  double freq = 0.1, double sigma = 4.0) {
  const int r = static_cast<int>(std::ceil(3 * sigma));
  double mean = 0.0;
  for (int y = y0; y < y0 + bs; ++y)
    for (int x = x0; x < x0 + bs; ++x) mean += img.at(x, y) / 255.0;
  mean /= bs * bs;

  std::vector<double> mags;
  for (int o = 0; o < n_orient; ++o) {
    const double th = kPi * o / n_orient;
    std::vector<double> k((2 * r + 1) * (2 * r + 1));
    double norm = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        const double g = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) *
                         std::cos(2 * kPi * freq * (dx * std::cos(th) + dy * std::sin(th)));
        k[(dy + r) * (2 * r + 1) + dx + r] = g;
        norm += g * g;
      }
    }
    norm = std::sqrt(norm);
    double sum_abs = 0.0;
    for (int y = y0; y < y0 + bs; ++y) {
      for (int x = x0; x < x0 + bs; ++x) {
        double acc = 0.0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx < 0 || yy < 0 || xx >= img.width() || yy >= img.height()) continue;
            acc += k[(dy + r) * (2 * r + 1) + dx + r] / norm * (img.at(xx, yy) / 255.0 - mean);
          }
        }
        sum_abs += std::abs(acc);
      }
    }
    mags.push_back(sum_abs / (bs * bs));
  }
  double m = 0.0;
  for (double v : mags) m += v;
  m /= mags.size();
  double ss = 0.0;
  for (double v : mags) ss += (v - m) * (v - m);
  return std::sqrt(ss / mags.size());
}

using Matrix = std::vector<std::vector<double>>;
using Vector = std::vector<double>;

inline Vector mean(const std::vector<Vector>& xs) {
  Vector m(xs.front().size(), 0.0);
  for (const auto& x : xs)
    for (std::size_t i = 0; i < x.size(); ++i) m[i] += x[i];
  for (double& v : m) v /= xs.size();
  return m;
}

// Unbiased sample covariance.
inline Matrix covariance(const std::vector<Vector>& xs) {
  const Vector m = mean(xs);
  const std::size_t d = m.size();
  Matrix c(d, Vector(d, 0.0));
  for (const auto& x : xs)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) c[i][j] += (x[i] - m[i]) * (x[j] - m[j]);
  for (auto& row : c)
    for (double& v : row) v /= (xs.size() - 1.0);
  return c;
}

inline Matrix pooled(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  const Matrix ca = covariance(a), cb = covariance(b);
  Matrix p = ca;
  const double na = a.size(), nb = b.size();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) p[i][j] = ((na - 1) * ca[i][j] + (nb - 1) * cb[i][j]) / (na + nb - 2);
  return p;
}

// Gaussian elimination with partial pivoting.
inline Vector solve(Matrix a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    if (a[c][c] == 0.0) throw std::runtime_error("singular");
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

// Log-odds of real vs fake under shared-covariance Gaussians:
// log(pr N(x; mr, S)) - log(pf N(x; mf, S)).
inline double lda_log_odds(const Vector& x, const Vector& mr, const Vector& mf, const Matrix& s, double prior_real) {
  Vector dr(x.size()), df(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    dr[i] = x[i] - mr[i];
    df[i] = x[i] - mf[i];
  }
  const Vector sr = solve(s, dr), sf = solve(s, df);
  double qr = 0.0, qf = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    qr += dr[i] * sr[i];
    qf += df[i] * sf[i];
  }
  return std::log(prior_real) - std::log(1 - prior_real) - 0.5 * (qr - qf);
}

// Bilinear sample with coordinates clamped into the image.
inline double bilinear(const liveprint::GrayImage& img, double x, double y) {
  x = std::fmin(std::fmax(x, 0.0), img.width() - 1.0);
  y = std::fmin(std::fmax(y, 0.0), img.height() - 1.0);
  int x0 = static_cast<int>(std::floor(x)), y0 = static_cast<int>(std::floor(y));
  if (x0 == img.width() - 1) --x0;
  if (y0 == img.height() - 1) --y0;
  const double fx = x - x0, fy = y - y0;
  return (1 - fy) * ((1 - fx) * img.at(x0, y0) + fx * img.at(x0 + 1, y0)) +
         fy * ((1 - fx) * img.at(x0, y0 + 1) + fx * img.at(x0 + 1, y0 + 1));
}

// Across-ridge profile of an interior block: mean of `width` bilinear samples
// along the ridge direction theta, for each of `length` offsets across it.
inline std::vector<double> signature(const liveprint::GrayImage& img, double cx, double cy, double theta,
                                     int length = 32, int width = 16) {
  std::vector<double> s;
  for (int k = 0; k < length; ++k) {
    const double t = k - (length - 1) / 2.0;
    double sum = 0.0;
    for (int j = 0; j < width; ++j) {
      const double u = j - (width - 1) / 2.0;
      sum += bilinear(img, cx - t * std::sin(theta) + u * std::cos(theta), cy + t * std::cos(theta) + u * std::sin(theta));
    }
    s.push_back(sum / width);
  }
  return s;
}

// Residual variance of the least-squares fit of a + b cos(wk) + c sin(wk) at
// a given period.
inline double sinusoid_residual_variance(const std::vector<double>& s, double period) {
  const double w = 2 * kPi / period;
  Matrix a(3, Vector(3, 0.0));
  Vector rhs(3, 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double basis[3] = {1.0, std::cos(w * k), std::sin(w * k)};
    for (int i = 0; i < 3; ++i) {
      rhs[i] += basis[i] * s[k];
      for (int j = 0; j < 3; ++j) a[i][j] += basis[i] * basis[j];
    }
  }
  const Vector c = solve(a, rhs);
  double ss = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double r = s[k] - (c[0] + c[1] * std::cos(w * k) + c[2] * std::sin(w * k));
    ss += r * r;
  }
  return ss / s.size();
}

}  // namespace oracle
