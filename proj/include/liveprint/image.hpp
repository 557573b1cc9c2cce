#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace liveprint {

/// 8-bit grayscale raster, row-major. 0 is black (ridge), 255 is white.
class GrayImage {
 public:
  GrayImage() = default;
  /// Constant image.
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Gray value scaled to [0,1].
  double unit(int x, int y) const { return at(x, y) / 255.0; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// Decodes a binary (P5) PGM with maxval <= 255. Header comments are skipped.
GrayImage load_pgm(std::span<const std::uint8_t> bytes);
/// Canonical encoding: "P5\n<w> <h>\n255\n" followed by the raw pixels.
std::vector<std::uint8_t> save_pgm(const GrayImage& img);

GrayImage read_pgm_file(const std::filesystem::path& path);
void write_pgm_file(const std::filesystem::path& path, const GrayImage& img);

struct BlockIndex {
  int bx = 0;
  int by = 0;
  friend bool operator==(const BlockIndex&, const BlockIndex&) = default;
};

struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int size = 0;
};

/// Non-overlapping square blocks covering an image; partial border strips are
/// not part of any block.
struct BlockGrid {
  int block_size = 16;
  int nx = 0;
  int ny = 0;

  int count() const noexcept { return nx * ny; }
  int linear(BlockIndex b) const noexcept { return b.by * nx + b.bx; }
  BlockIndex index(int linear) const noexcept { return {linear % nx, linear / nx}; }
  bool contains(BlockIndex b) const noexcept { return b.bx >= 0 && b.by >= 0 && b.bx < nx && b.by < ny; }
  PixelRect rect(BlockIndex b) const noexcept { return {b.bx * block_size, b.by * block_size, block_size}; }
  /// Block center in pixel coordinates (pixel centers at integer positions).
  double center_x(BlockIndex b) const noexcept { return b.bx * block_size + (block_size - 1) / 2.0; }
  double center_y(BlockIndex b) const noexcept { return b.by * block_size + (block_size - 1) / 2.0; }

  friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

BlockGrid block_partition(const GrayImage& img, int block_size = 16);

}  // namespace liveprint
