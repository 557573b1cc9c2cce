#include "liveprint/image.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <string>

#include "liveprint/error.hpp"

namespace liveprint {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::MalformedHeader, "image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::TruncatedData, "pixel count does not match dimensions");
  }
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = static_cast<char>(bytes_[pos_]);
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        ++pos_;
      } else {
        return;
      }
    }
  }

  long number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') ++pos_;
    if (pos_ == start || pos_ - start > 9) {
      throw Error(ErrorCode::MalformedHeader, std::string("bad ") + what);
    }
    long value = 0;
    const auto* first = reinterpret_cast<const char*>(bytes_.data() + start);
    std::from_chars(first, first + (pos_ - start), value);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void end_of_header() {
    if (pos_ >= bytes_.size()) throw Error(ErrorCode::TruncatedData, "missing raster");
    const char c = static_cast<char>(bytes_[pos_]);
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') {
      throw Error(ErrorCode::MalformedHeader, "no whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t position() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage load_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw Error(ErrorCode::MalformedHeader, "missing P5 magic");
  }
  HeaderReader reader(bytes);
  reader.advance(2);
  const long width = reader.number("width");
  const long height = reader.number("height");
  const long maxval = reader.number("maxval");
  if (width <= 0 || height <= 0) throw Error(ErrorCode::MalformedHeader, "zero dimension");
  if (maxval <= 0) throw Error(ErrorCode::MalformedHeader, "zero maxval");
  if (maxval > 255) throw Error(ErrorCode::UnsupportedDepth, "maxval " + std::to_string(maxval));
  reader.end_of_header();

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const std::size_t offset = reader.position();
  if (bytes.size() - offset < count) {
    throw Error(ErrorCode::TruncatedData,
                "expected " + std::to_string(count) + " pixel bytes, got " + std::to_string(bytes.size() - offset));
  }
  std::vector<std::uint8_t> pixels(bytes.begin() + offset, bytes.begin() + offset + count);
  if (maxval != 255) {
    // Rescale to the full 8-bit range.
    for (auto& p : pixels) {
      const long v = std::min<long>(p, maxval);
      p = static_cast<std::uint8_t>((v * 255 + maxval / 2) / maxval);
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> save_pgm(const GrayImage& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels().begin(), img.pixels().end());
  return out;
}

GrayImage read_pgm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_pgm(bytes);
}

void write_pgm_file(const std::filesystem::path& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  const auto bytes = save_pgm(img);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

BlockGrid block_partition(const GrayImage& img, int block_size) {
  if (block_size < 4) throw Error(ErrorCode::BadConfig, "block_size must be >= 4");
  if (img.width() < block_size || img.height() < block_size) {
    throw Error(ErrorCode::ImageTooSmall, std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                              " image is smaller than one " + std::to_string(block_size) +
                                              "px block");
  }
  return BlockGrid{block_size, img.width() / block_size, img.height() / block_size};
}

}  // namespace liveprint
