#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "geoscout/core.hpp"

namespace geoscout {

// Row-major 8-bit image with 1 (gray) or 3 (RGB) interleaved channels.
class ImageBuffer {
 public:
  ImageBuffer(int width, int height, int channels);
  ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }

  std::uint8_t at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  double normalized(int x, int y, int c = 0) const { return at(x, y, c) / 255.0; }

  std::span<const std::uint8_t> samples() const { return data_; }
  std::span<std::uint8_t> samples() { return data_; }
  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(data_).subspan(index(0, y, 0), row_stride());
  }
  std::size_t row_stride() const { return static_cast<std::size_t>(width_) * channels_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  int width_;
  int height_;
  int channels_;
  std::vector<std::uint8_t> data_;
};

// Pixel rectangle, half-open: [x, x+w) x [y, y+h).
struct PixelRect {
  int x = 0, y = 0, w = 0, h = 0;
};

ImageBuffer crop(const ImageBuffer& img, PixelRect r);
void paste(ImageBuffer& dst, const ImageBuffer& src, int x, int y);
ImageBuffer to_channels(const ImageBuffer& img, int channels);

// Largest centered rectangle whose sides are divisible by the grid.
PixelRect grid_crop_rect(int width, int height, const GridSpec& grid);
ImageBuffer center_crop_to_grid(const ImageBuffer& img, const GridSpec& grid);
// Cell k of an image whose dimensions are divisible by the grid.
PixelRect grid_cell_rect(const ImageBuffer& img, const GridSpec& grid, int k);

// Bilinear resize with half-pixel centers, evaluated in 16.16 fixed point so
// results are bit-identical on every platform. Rows are resized in parallel.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_width, int out_height);

namespace serial {
// Single-threaded reference for resize_bilinear.
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_width, int out_height);
}  // namespace serial

ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& img);

}  // namespace geoscout
