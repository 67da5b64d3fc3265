#pragma once

// From a segmentation mask to four paper corners: keep the largest blob,
// trace its outer boundary, reduce the boundary to a quadrilateral, and
// smooth the corners over time.

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "papertab/geometry.hpp"
#include "papertab/raster.hpp"

namespace papertab {

using PixelPos = Eigen::Vector2i;
using Contour = std::vector<PixelPos>;

/// The largest 8-connected foreground component (earliest in raster order
/// on ties). Throws EmptyMask if nothing is set.
BinaryMask largest_region(const BinaryMask& mask);

/// Moore boundary trace of a single 8-connected region: clockwise on
/// screen, starting at the top-most, then left-most, foreground pixel.
Contour trace_contour(const BinaryMask& region);

/// Douglas-Peucker with epsilon doubling from 1 px until at most four
/// vertices remain; falls back to the extreme points of x + y and y - x.
/// Throws QuadFitFailed when no valid quad comes out.
Quadd fit_quad(const Contour& contour);

/// Simplifies a closed contour; returns the kept vertices in contour order.
std::vector<PixelPos> simplify_closed(const Contour& contour, double epsilon);

/// A fitted quad should cover most of the component it came from. Below
/// the ratio the frame is treated as low confidence.
constexpr double kMinQuadCoverage = 0.8;

inline bool quad_covers_region(const Quadd& quad, std::size_t region_area) {
  return quad.area() >= kMinQuadCoverage * static_cast<double>(region_area);
}

/// Per-stream corner smoother. Not shareable between streams.
struct SmootherState {
  double alpha = 0.6;
  /// Fraction of the frame diagonal a corner may move in one frame before
  /// the new quad is treated as an outlier.
  double jump_threshold = 0.05;
  /// After this many consecutive rejections the new position is accepted,
  /// so a deliberately moved sheet is re-acquired.
  int max_rejections = 3;

  std::optional<Quadd> previous;
  int rejections = 0;

  /// Throws InvalidConfig when alpha is outside (0, 1] or the threshold
  /// outside (0, 0.5).
  void validate() const;
};

/// First call seeds the state and passes the quad through. Afterwards an
/// outlier jump returns the previous quad; otherwise each corner becomes
/// alpha * current + (1 - alpha) * previous.
Quadd smooth_corners(SmootherState& state, const Quadd& quad,
                     double frame_diag);

}  // namespace papertab
