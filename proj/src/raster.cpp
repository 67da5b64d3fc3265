#include "papertab/raster.hpp"

#include <algorithm>
#include <cmath>

namespace papertab {

namespace {

// Sample positions this close outside the frame are snapped onto the edge,
// so integer-valued mappings computed in floating point stay exact.
constexpr double kEdgeSnap = 1e-9;

template <int Channels>
inline bool sample_bilinear(const Image<std::uint8_t, Channels>& src, double x,
                            double y, std::uint8_t* out) {
  const double max_x = src.width() - 1;
  const double max_y = src.height() - 1;
  if (!(x >= -kEdgeSnap && y >= -kEdgeSnap && x <= max_x + kEdgeSnap &&
        y <= max_y + kEdgeSnap)) {
    return false;
  }
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, src.width() - 1);
  const int y1 = std::min(y0 + 1, src.height() - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const std::uint8_t* r0 = src.row(y0);
  const std::uint8_t* r1 = src.row(y1);
  for (int c = 0; c < Channels; ++c) {
    const double top = r0[x0 * Channels + c] +
                       fx * (r0[x1 * Channels + c] - r0[x0 * Channels + c]);
    const double bot = r1[x0 * Channels + c] +
                       fx * (r1[x1 * Channels + c] - r1[x0 * Channels + c]);
    out[c] = to_u8(top + fy * (bot - top));
  }
  return true;
}

template <int Channels>
Image<std::uint8_t, Channels> warp_impl(const Image<std::uint8_t, Channels>& src,
                                        const Homographyd& h, int out_width,
                                        int out_height) {
  Image<std::uint8_t, Channels> out(out_width, out_height, 255);
  const Eigen::Matrix3d& m = h.matrix();
  for (int y = 0; y < out_height; ++y) {
    std::uint8_t* dst = out.row(y);
    // (x', y', w') is affine in the output column, so step it along the row.
    const Eigen::Vector3d base = m * Eigen::Vector3d(0.0, y, 1.0);
    const Eigen::Vector3d step = m.col(0);
    for (int x = 0; x < out_width; ++x) {
      const Eigen::Vector3d v = base + x * step;
      if (std::abs(v.z()) < detail::kDegenerateTol<double>) continue;
      sample_bilinear(src, v.x() / v.z(), v.y() / v.z(), dst + x * Channels);
    }
  }
  return out;
}

}  // namespace

GrayFrame to_luma(const ColorFrame& frame) {
  GrayFrame out(frame.width(), frame.height());
  const auto& in = frame.data();
  auto& dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = to_u8(0.299 * in[3 * i] + 0.587 * in[3 * i + 1] +
                   0.114 * in[3 * i + 2]);
  }
  return out;
}

std::uint8_t bilinear_sample(const GrayFrame& frame, double x, double y,
                             std::uint8_t fill) {
  std::uint8_t v = fill;
  sample_bilinear(frame, x, y, &v);
  return v;
}

GrayFrame warp_bird_eye(const GrayFrame& src, const Homographyd& h_out_to_src,
                        int out_width, int out_height) {
  return warp_impl(src, h_out_to_src, out_width, out_height);
}

ColorFrame warp_bird_eye(const ColorFrame& src,
                         const Homographyd& h_out_to_src, int out_width,
                         int out_height) {
  return warp_impl(src, h_out_to_src, out_width, out_height);
}

GrayFrame resize(const GrayFrame& frame, int out_width, int out_height) {
  if (frame.same_size(out_width, out_height)) return frame;
  GrayFrame out(out_width, out_height);
  const double sx = static_cast<double>(frame.width()) / out_width;
  const double sy = static_cast<double>(frame.height()) / out_height;
  const double max_x = frame.width() - 1;
  const double max_y = frame.height() - 1;
  for (int y = 0; y < out_height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, max_y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < out_width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, max_x);
      dst[x] = bilinear_sample(frame, fx, fy, 255);
    }
  }
  return out;
}

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out = mask;
  for (auto& v : out.data()) v = v ? 0 : 1;
  return out;
}

std::size_t count_foreground(const BinaryMask& mask) {
  return static_cast<std::size_t>(
      std::count_if(mask.data().begin(), mask.data().end(),
                    [](std::uint8_t v) { return v != 0; }));
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_size(b)) {
    throw Error(ErrorCode::DimensionMismatch, "IoU of differently sized masks");
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const bool fa = a.data()[i] != 0;
    const bool fb = b.data()[i] != 0;
    inter += fa && fb;
    uni += fa || fb;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

GrayFrame mask_to_gray(const BinaryMask& mask, std::uint8_t on,
                       std::uint8_t off) {
  GrayFrame out(mask.width(), mask.height());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = mask.data()[i] ? on : off;
  }
  return out;
}

}  // namespace papertab
