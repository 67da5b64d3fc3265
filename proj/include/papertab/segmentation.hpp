#pragma once

// Paper masks: a classical Otsu + convex-hull segmenter, and the adapter for
// externally produced mask frames (P5, >= 128 is paper).

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "papertab/maskquad.hpp"
#include "papertab/raster.hpp"

namespace papertab {

using Histogram = std::array<std::uint64_t, 256>;

Histogram histogram(const GrayFrame& gray);

/// Otsu's threshold t (class 0 is <= t). nullopt when the histogram has a
/// single populated level.
std::optional<int> otsu_threshold(const Histogram& hist);

/// Mean luma of the two Otsu classes, dark first.
std::array<double, 2> otsu_class_means(const Histogram& hist, int threshold);

/// Minimum spacing of the Otsu class means before a frame counts as having
/// a dark desk and a bright sheet at all.
constexpr double kMinModeSeparation = 20.0;

/// Smallest paper component, as a fraction of the frame.
constexpr double kMinPaperFraction = 0.01;

/// Convex hull of the given pixels, clockwise on screen (y down).
std::vector<PixelPos> convex_hull(std::vector<PixelPos> points);

/// Fills every pixel whose center lies inside or on a convex polygon.
BinaryMask fill_convex_polygon(int width, int height,
                               const std::vector<PixelPos>& hull);

/// Bright Otsu class -> largest 8-connected component -> filled convex
/// hull. Throws NoPaperFound on a degenerate histogram or a component below
/// 1% of the frame.
BinaryMask classical_segment(const GrayFrame& gray);

/// Foreground where the mask frame is >= 128. Throws DimensionMismatch if
/// the mask is not width x height.
BinaryMask binarize_external_mask(const GrayFrame& mask, int width,
                                  int height);

}  // namespace papertab
