#include "papertab/cleanup.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace papertab {

CleanupParams CleanupParams::defaults_for(int width, int height) {
  CleanupParams p;
  int window = std::min(width, height) / 30;
  if (window % 2 == 0) --window;
  p.window = std::max(window, 15);
  const double scale = height / 1188.0;
  p.min_area = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(4.0 * scale * scale)));
  return p;
}

void CleanupParams::validate(int width, int height) const {
  if (window < 3 || window % 2 == 0 ||
      window > 2 * std::min(width, height) - 1) {
    throw Error(ErrorCode::InvalidConfig,
                "window must be odd, >= 3 and <= 2 * min(w, h) - 1");
  }
  if (offset_c < 0 || offset_c > 255) {
    throw Error(ErrorCode::InvalidConfig, "offset_c must lie in [0, 255]");
  }
  if (morph_radius < 0) {
    throw Error(ErrorCode::InvalidConfig, "morph_radius must be >= 0");
  }
  if (min_area < 1) {
    throw Error(ErrorCode::InvalidConfig, "min_area must be >= 1");
  }
  if (!(max_area_frac > 0.0 && max_area_frac <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "max_area_frac must lie in (0, 1]");
  }
}

BinaryMask adaptive_threshold(const GrayFrame& gray, int window,
                              int offset_c) {
  const int w = gray.width();
  const int h = gray.height();
  if (window < 3 || window % 2 == 0 || window > 2 * std::min(w, h) - 1) {
    throw Error(ErrorCode::InvalidConfig, "invalid adaptive threshold window");
  }
  // (w + 1) x (h + 1) summed-area table; 255 * 2^24 pixels fits in 32 bits.
  const int stride = w + 1;
  std::vector<std::uint32_t> integral(
      static_cast<std::size_t>(stride) * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = gray.row(y);
    std::uint32_t run = 0;
    std::uint32_t* above = integral.data() + static_cast<std::size_t>(y) * stride;
    std::uint32_t* cur = above + stride;
    for (int x = 0; x < w; ++x) {
      run += src[x];
      cur[x + 1] = above[x + 1] + run;
    }
  }

  const int r = window / 2;
  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - r);
    const int y1 = std::min(h, y + r + 1);
    const std::uint32_t* top = integral.data() + static_cast<std::size_t>(y0) * stride;
    const std::uint32_t* bottom = integral.data() + static_cast<std::size_t>(y1) * stride;
    const std::uint8_t* src = gray.row(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - r);
      const int x1 = std::min(w, x + r + 1);
      const std::int64_t sum = static_cast<std::int64_t>(bottom[x1]) -
                               bottom[x0] - top[x1] + top[x0];
      const std::int64_t count =
          static_cast<std::int64_t>(x1 - x0) * (y1 - y0);
      // pixel < sum / count - C, multiplied through by count.
      dst[x] = (src[x] + offset_c) * count < sum ? 1 : 0;
    }
  }
  return out;
}

namespace {

// Horizontal pass of a square min/max filter. `need_all` selects erosion
// (every pixel of a window lying fully inside the frame) over dilation.
BinaryMask morph_rows(const BinaryMask& in, int radius, bool need_all) {
  const int w = in.width();
  const int full = 2 * radius + 1;
  BinaryMask out(w, in.height());
  std::vector<int> prefix(static_cast<std::size_t>(w) + 1, 0);
  for (int y = 0; y < in.height(); ++y) {
    const std::uint8_t* src = in.row(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + src[x];
    for (int x = 0; x < w; ++x) {
      const int count = prefix[std::min(w, x + radius + 1)] -
                        prefix[std::max(0, x - radius)];
      dst[x] = need_all ? count == full : count > 0;
    }
  }
  return out;
}

// Vertical pass, sliding per-column counts down the frame.
BinaryMask morph_cols(const BinaryMask& in, int radius, bool need_all) {
  const int w = in.width();
  const int h = in.height();
  const int full = 2 * radius + 1;
  BinaryMask out(w, h);
  std::vector<int> count(static_cast<std::size_t>(w), 0);
  for (int y = 0; y < std::min(h, radius); ++y) {
    const std::uint8_t* src = in.row(y);
    for (int x = 0; x < w; ++x) count[x] += src[x];
  }
  for (int y = 0; y < h; ++y) {
    if (y + radius < h) {
      const std::uint8_t* enter = in.row(y + radius);
      for (int x = 0; x < w; ++x) count[x] += enter[x];
    }
    if (y - radius - 1 >= 0) {
      const std::uint8_t* leave = in.row(y - radius - 1);
      for (int x = 0; x < w; ++x) count[x] -= leave[x];
    }
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      dst[x] = need_all ? count[x] == full : count[x] > 0;
    }
  }
  return out;
}

// Path-halving union-find over provisional labels.
struct DisjointSet {
  std::vector<std::int32_t> parent{0};

  std::int32_t make() {
    parent.push_back(static_cast<std::int32_t>(parent.size()));
    return parent.back();
  }
  std::int32_t find(std::int32_t a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

}  // namespace

BinaryMask erode(const BinaryMask& mask, int radius) {
  if (radius < 1) throw Error(ErrorCode::InvalidConfig, "radius must be >= 1");
  return morph_cols(morph_rows(mask, radius, true), radius, true);
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 1) throw Error(ErrorCode::InvalidConfig, "radius must be >= 1");
  return morph_cols(morph_rows(mask, radius, false), radius, false);
}

Labeling label_components(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  Labeling result{Image<std::int32_t, 1>(w, h, 0), {}};
  auto& labels = result.labels;
  DisjointSet sets;

  // First pass over the scanned neighbors W, NW, N, NE. When N is set it is
  // already joined with the other three, so only the remaining cases need
  // unions.
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* m = mask.row(y);
    std::int32_t* cur = labels.row(y);
    const std::int32_t* up = y > 0 ? labels.row(y - 1) : nullptr;
    for (int x = 0; x < w; ++x) {
      if (!m[x]) continue;
      const std::int32_t west = x > 0 ? cur[x - 1] : 0;
      const std::int32_t nw = up && x > 0 ? up[x - 1] : 0;
      const std::int32_t n = up ? up[x] : 0;
      const std::int32_t ne = up && x + 1 < w ? up[x + 1] : 0;
      std::int32_t label;
      if (n) {
        label = n;
      } else if (ne) {
        label = ne;
        if (nw) {
          sets.unite(ne, nw);
        } else if (west) {
          sets.unite(ne, west);
        }
      } else if (nw) {
        label = nw;
      } else if (west) {
        label = west;
      } else {
        label = sets.make();
      }
      cur[x] = label;
    }
  }

  // Second pass: resolve roots to dense labels and accumulate stats.
  std::vector<std::int32_t> dense(sets.parent.size(), 0);
  auto& comps = result.components;
  for (int y = 0; y < h; ++y) {
    std::int32_t* cur = labels.row(y);
    const bool edge_row = y == 0 || y == h - 1;
    for (int x = 0; x < w; ++x) {
      std::int32_t& l = cur[x];
      if (l == 0) continue;
      const std::int32_t root = sets.find(l);
      if (dense[root] == 0) {
        comps.push_back({static_cast<int>(comps.size()) + 1, 0, x, y, x, y,
                         false});
        dense[root] = static_cast<std::int32_t>(comps.size());
      }
      l = dense[root];
      ComponentStats& s = comps[l - 1];
      ++s.area;
      if (x < s.min_x) s.min_x = x;
      if (x > s.max_x) s.max_x = x;
      s.max_y = y;
      if (edge_row || x == 0 || x == w - 1) s.touches_border = true;
    }
  }
  return result;
}

BinaryMask filter_components(const Labeling& labeling, std::size_t min_area,
                             double max_area_frac) {
  const auto& labels = labeling.labels;
  const double image_area = static_cast<double>(labels.pixel_count());
  std::vector<std::uint8_t> keep(labeling.components.size() + 1, 0);
  for (const auto& c : labeling.components) {
    const bool big_enough = c.area >= min_area;
    const bool small_enough = c.area <= max_area_frac * image_area;
    const bool palm_like = c.touches_border && c.area > 25 * min_area;
    keep[c.label] = big_enough && small_enough && !palm_like;
  }
  BinaryMask out(labels.width(), labels.height());
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = keep[labels.data()[i]];
  }
  return out;
}

BinaryMask extract_ink(const GrayFrame& warped, const CleanupParams& params) {
  params.validate(warped.width(), warped.height());
  BinaryMask ink = adaptive_threshold(warped, params.window, params.offset_c);
  if (params.morph_radius > 0) {
    ink = dilate(erode(ink, params.morph_radius), params.morph_radius);
  }
  return filter_components(label_components(ink), params.min_area,
                           params.max_area_frac);
}

}  // namespace papertab
