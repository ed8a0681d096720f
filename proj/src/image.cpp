#include "geoscout/image.hpp"

#include <algorithm>

namespace geoscout {

ImageBuffer::ImageBuffer(int width, int height, int channels)
    : ImageBuffer(width, height, channels,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                            std::max(height, 0) * std::max(channels, 0))) {}

ImageBuffer::ImageBuffer(int width, int height, int channels, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), channels_(channels), data_(std::move(samples)) {
  if (width < 4 || height < 4) throw InvalidArgument("image must be at least 4x4");
  if (channels != 1 && channels != 3) throw InvalidArgument("image must have 1 or 3 channels");
  if (data_.size() != static_cast<std::size_t>(width) * height * channels)
    throw InvalidArgument("sample count does not match width*height*channels");
}

ImageBuffer crop(const ImageBuffer& img, PixelRect r) {
  if (r.x < 0 || r.y < 0 || r.w <= 0 || r.h <= 0 || r.x + r.w > img.width() ||
      r.y + r.h > img.height())
    throw IndexError("crop rectangle outside image");
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(r.w) * r.h * img.channels());
  const std::size_t span_len = static_cast<std::size_t>(r.w) * img.channels();
  for (int y = r.y; y < r.y + r.h; ++y) {
    auto row = img.row(y).subspan(static_cast<std::size_t>(r.x) * img.channels(), span_len);
    out.insert(out.end(), row.begin(), row.end());
  }
  return ImageBuffer(r.w, r.h, img.channels(), std::move(out));
}

void paste(ImageBuffer& dst, const ImageBuffer& src, int x, int y) {
  if (src.channels() != dst.channels()) throw InvalidArgument("paste channel mismatch");
  if (x < 0 || y < 0 || x + src.width() > dst.width() || y + src.height() > dst.height())
    throw IndexError("paste outside destination");
  auto out = dst.samples();
  for (int sy = 0; sy < src.height(); ++sy) {
    auto row = src.row(sy);
    std::copy(row.begin(), row.end(),
              out.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(y + sy) * dst.width() + x) *
                                                        dst.channels()));
  }
}

ImageBuffer to_channels(const ImageBuffer& img, int channels) {
  if (img.channels() == channels) return img;
  ImageBuffer out(img.width(), img.height(), channels);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      if (channels == 1) {
        // ITU-R BT.601 luma in integer arithmetic.
        const int v = (299 * img.at(x, y, 0) + 587 * img.at(x, y, 1) + 114 * img.at(x, y, 2) + 500) / 1000;
        out.at(x, y) = static_cast<std::uint8_t>(v);
      } else {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(x, y);
      }
    }
  return out;
}

PixelRect grid_crop_rect(int width, int height, const GridSpec& grid) {
  const int w = width - width % grid.cols();
  const int h = height - height % grid.rows();
  return {(width - w) / 2, (height - h) / 2, w, h};
}

ImageBuffer center_crop_to_grid(const ImageBuffer& img, const GridSpec& grid) {
  return crop(img, grid_crop_rect(img.width(), img.height(), grid));
}

PixelRect grid_cell_rect(const ImageBuffer& img, const GridSpec& grid, int k) {
  if (img.width() % grid.cols() != 0 || img.height() % grid.rows() != 0)
    throw InvalidArgument("image dimensions not divisible by grid " + grid.str());
  if (k < 0 || k >= grid.cells()) throw IndexError("grid cell " + std::to_string(k));
  const int pw = img.width() / grid.cols();
  const int ph = img.height() / grid.rows();
  return {(k % grid.cols()) * pw, (k / grid.cols()) * ph, pw, ph};
}

namespace {

struct Tap {
  int i0;
  int i1;
  std::int64_t w1;  // weight of i1 in 1/65536 units
};

std::vector<Tap> make_taps(int src, int dst) {
  std::vector<Tap> taps(static_cast<std::size_t>(dst));
  for (int d = 0; d < dst; ++d) {
    std::int64_t f = (static_cast<std::int64_t>(2 * d + 1) * src * 65536) / (2LL * dst) - 32768;
    if (f < 0) f = 0;
    int i0 = static_cast<int>(f >> 16);
    std::int64_t w = f & 0xFFFF;
    if (i0 >= src - 1) {
      i0 = src - 1;
      w = 0;
    }
    taps[static_cast<std::size_t>(d)] = {i0, std::min(i0 + 1, src - 1), w};
  }
  return taps;
}

void resize_row(const ImageBuffer& img, ImageBuffer& out, const std::vector<Tap>& xt, const Tap& ty, int dy) {
  const int ch = img.channels();
  const std::int64_t wy1 = ty.w1, wy0 = 65536 - ty.w1;
  for (int dx = 0; dx < out.width(); ++dx) {
    const Tap& tx = xt[static_cast<std::size_t>(dx)];
    const std::int64_t wx1 = tx.w1, wx0 = 65536 - tx.w1;
    for (int c = 0; c < ch; ++c) {
      const std::int64_t top = img.at(tx.i0, ty.i0, c) * wx0 + img.at(tx.i1, ty.i0, c) * wx1;
      const std::int64_t bot = img.at(tx.i0, ty.i1, c) * wx0 + img.at(tx.i1, ty.i1, c) * wx1;
      const std::int64_t v = (top * wy0 + bot * wy1 + (std::int64_t{1} << 31)) >> 32;
      out.at(dx, dy, c) = static_cast<std::uint8_t>(std::min<std::int64_t>(v, 255));
    }
  }
}

void check_resize_args(int out_width, int out_height) {
  if (out_width < 4 || out_height < 4) throw InvalidArgument("resize target must be at least 4x4");
}

}  // namespace

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_width, int out_height) {
  check_resize_args(out_width, out_height);
  ImageBuffer out(out_width, out_height, img.channels());
  const auto xt = make_taps(img.width(), out_width);
  const auto yt = make_taps(img.height(), out_height);
#pragma omp parallel for schedule(static)
  for (int dy = 0; dy < out_height; ++dy) resize_row(img, out, xt, yt[static_cast<std::size_t>(dy)], dy);
  return out;
}

namespace serial {
ImageBuffer resize_bilinear(const ImageBuffer& img, int out_width, int out_height) {
  check_resize_args(out_width, out_height);
  ImageBuffer out(out_width, out_height, img.channels());
  const auto xt = make_taps(img.width(), out_width);
  const auto yt = make_taps(img.height(), out_height);
  for (int dy = 0; dy < out_height; ++dy) resize_row(img, out, xt, yt[static_cast<std::size_t>(dy)], dy);
  return out;
}
}  // namespace serial

}  // namespace geoscout
