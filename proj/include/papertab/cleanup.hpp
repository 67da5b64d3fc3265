#pragma once

// Ink extraction on the rectified frame: adaptive threshold, binary
// morphology, and connected-component filtering that drops noise and the
// palm/finger residue entering from the frame edges.

#include <cstdint>
#include <vector>

#include "papertab/raster.hpp"

namespace papertab {

struct ComponentStats {
  int label = 0;
  std::size_t area = 0;
  int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
  bool touches_border = false;
};

struct Labeling {
  Image<std::int32_t, 1> labels;  // 0 = background, components 1..n
  std::vector<ComponentStats> components;  // components[i].label == i + 1
};

struct CleanupParams {
  int window = 27;
  int offset_c = 10;
  int morph_radius = 1;
  std::size_t min_area = 4;
  double max_area_frac = 0.05;

  /// Defaults scaled to the output raster: window is the largest odd value
  /// <= min(w, h) / 30 (at least 15); min_area is 4 px at 1188 rows, scaled
  /// with the square of the height.
  static CleanupParams defaults_for(int width, int height);

  /// Throws InvalidConfig when a field is out of range for a w x h frame.
  void validate(int width, int height) const;
};

/// Ink wherever a pixel is darker than its window mean by more than
/// offset_c. Windows are clipped at the frame edges. Uses an integral image
/// and exact integer comparisons.
BinaryMask adaptive_threshold(const GrayFrame& gray, int window, int offset_c);

/// Square structuring element of side 2r + 1; outside the frame counts as
/// background.
BinaryMask erode(const BinaryMask& mask, int radius);
BinaryMask dilate(const BinaryMask& mask, int radius);

/// Two-pass union-find labeling with 8-connectivity. Labels are dense and
/// numbered in raster order of each component's first pixel.
Labeling label_components(const BinaryMask& mask);

/// Keeps a component iff min_area <= area <= max_area_frac * image area and
/// it is not a large border-touching blob (area > 25 * min_area).
BinaryMask filter_components(const Labeling& labeling, std::size_t min_area,
                             double max_area_frac);

/// threshold -> opening -> label -> filter.
BinaryMask extract_ink(const GrayFrame& warped, const CleanupParams& params);

}  // namespace papertab
