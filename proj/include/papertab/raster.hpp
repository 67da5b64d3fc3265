#pragma once

// Frame containers and the pixel-level transforms of the rectifier:
// luma conversion, bilinear sampling, the inverse-mapping warp, mirroring
// and resizing.

#include <Eigen/Core>

#include <cstdint>
#include <type_traits>
#include <vector>

#include "papertab/error.hpp"
#include "papertab/geometry.hpp"

namespace papertab {

/// Row-major interleaved raster with a compile-time channel count.
///
/// `Pixel = bool` stores one byte per flag (0 or 1) so the buffer stays
/// addressable; everything else stores `Pixel` directly.
template <typename Pixel, int Channels>
class Image {
 public:
  using Storage = std::conditional_t<std::is_same_v<Pixel, bool>,
                                     std::uint8_t, Pixel>;
  static constexpr int kChannels = Channels;

  Image() = default;

  Image(int width, int height, Storage fill = Storage{})
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidConfig, "image dimensions must be >= 1");
    }
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }

  Image(int width, int height, std::vector<Storage> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1 ||
        data_.size() != static_cast<std::size_t>(width) * height * Channels) {
      throw Error(ErrorCode::DimensionMismatch,
                  "buffer length does not match dimensions");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }
  bool same_size(int w, int h) const { return width_ == w && height_ == h; }
  template <typename P, int C>
  bool same_size(const Image<P, C>& o) const {
    return same_size(o.width(), o.height());
  }

  Storage& operator()(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }
  Storage operator()(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * Channels + c];
  }

  Storage* row(int y) {
    return data_.data() + static_cast<std::size_t>(y) * width_ * Channels;
  }
  const Storage* row(int y) const {
    return data_.data() + static_cast<std::size_t>(y) * width_ * Channels;
  }

  std::vector<Storage>& data() { return data_; }
  const std::vector<Storage>& data() const { return data_; }

  /// Single-channel view as a row-major Eigen matrix (rows = height).
  auto matrix() const {
    static_assert(Channels == 1);
    using Mat = Eigen::Matrix<Storage, Eigen::Dynamic, Eigen::Dynamic,
                              Eigen::RowMajor>;
    return Eigen::Map<const Mat>(data_.data(), height_, width_);
  }

  friend bool operator==(const Image& a, const Image& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ &&
           a.data_ == b.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Storage> data_;
};

using GrayFrame = Image<std::uint8_t, 1>;
using ColorFrame = Image<std::uint8_t, 3>;
using BinaryMask = Image<bool, 1>;

/// Round half away from zero and clamp into [0, 255].
inline std::uint8_t to_u8(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

GrayFrame to_luma(const ColorFrame& frame);

/// Bilinear interpolation at (x, y); `fill` outside [0, w-1] x [0, h-1].
std::uint8_t bilinear_sample(const GrayFrame& frame, double x, double y,
                             std::uint8_t fill);

/// Inverse-mapping warp: output pixel (x, y) samples the source at
/// h_out_to_src(x, y). Unreachable or out-of-frame samples are white.
GrayFrame warp_bird_eye(const GrayFrame& src, const Homographyd& h_out_to_src,
                        int out_width, int out_height);
ColorFrame warp_bird_eye(const ColorFrame& src,
                         const Homographyd& h_out_to_src, int out_width,
                         int out_height);

template <typename Pixel, int Channels>
Image<Pixel, Channels> flip_horizontal(const Image<Pixel, Channels>& in) {
  Image<Pixel, Channels> out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    const auto* src = in.row(y);
    auto* dst = out.row(y);
    for (int x = 0; x < in.width(); ++x) {
      const int mx = in.width() - 1 - x;
      for (int c = 0; c < Channels; ++c) {
        dst[mx * Channels + c] = src[x * Channels + c];
      }
    }
  }
  return out;
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
GrayFrame resize(const GrayFrame& frame, int out_width, int out_height);

/// Inverts a mask: every flag flipped.
BinaryMask complement(const BinaryMask& mask);

std::size_t count_foreground(const BinaryMask& mask);

/// Intersection over union of two equally sized masks (1 when both empty).
double mask_iou(const BinaryMask& a, const BinaryMask& b);

/// Renders a mask as 8-bit: foreground -> `on`, background -> `off`.
GrayFrame mask_to_gray(const BinaryMask& mask, std::uint8_t on = 255,
                       std::uint8_t off = 0);

}  // namespace papertab
