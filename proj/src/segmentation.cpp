#include "papertab/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "papertab/cleanup.hpp"

namespace papertab {

Histogram histogram(const GrayFrame& gray) {
  Histogram hist{};
  for (std::uint8_t v : gray.data()) ++hist[v];
  return hist;
}

std::optional<int> otsu_threshold(const Histogram& hist) {
  const int populated = static_cast<int>(
      std::count_if(hist.begin(), hist.end(), [](auto n) { return n > 0; }));
  if (populated < 2) return std::nullopt;

  double total = 0.0, weighted = 0.0;
  for (int i = 0; i < 256; ++i) {
    total += static_cast<double>(hist[i]);
    weighted += static_cast<double>(i) * static_cast<double>(hist[i]);
  }
  double w0 = 0.0, sum0 = 0.0, best = -1.0;
  int best_t = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += static_cast<double>(hist[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(hist[t]);
    const double w1 = total - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (weighted - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  return best_t;
}

std::array<double, 2> otsu_class_means(const Histogram& hist, int threshold) {
  double n0 = 0, s0 = 0, n1 = 0, s1 = 0;
  for (int i = 0; i < 256; ++i) {
    const double n = static_cast<double>(hist[i]);
    if (i <= threshold) {
      n0 += n;
      s0 += n * i;
    } else {
      n1 += n;
      s1 += n * i;
    }
  }
  return {n0 > 0 ? s0 / n0 : 0.0, n1 > 0 ? s1 / n1 : 0.0};
}

std::vector<PixelPos> convex_hull(std::vector<PixelPos> pts) {
  std::sort(pts.begin(), pts.end(), [](const PixelPos& a, const PixelPos& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  auto cross = [](const PixelPos& o, const PixelPos& a, const PixelPos& b) {
    return static_cast<long long>(a.x() - o.x()) * (b.y() - o.y()) -
           static_cast<long long>(a.y() - o.y()) * (b.x() - o.x());
  };
  // Monotone chain; with y down, a positive cross is a clockwise turn, so
  // dropping non-clockwise turns yields a clockwise hull on screen.
  std::vector<PixelPos> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

BinaryMask fill_convex_polygon(int width, int height,
                               const std::vector<PixelPos>& hull) {
  BinaryMask out(width, height);
  if (hull.empty()) return out;
  int ymin = hull[0].y(), ymax = hull[0].y();
  for (const auto& p : hull) {
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  ymin = std::max(ymin, 0);
  ymax = std::min(ymax, height - 1);
  const std::size_t n = hull.size();
  constexpr double kEps = 1e-9;
  for (int y = ymin; y <= ymax; ++y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      const PixelPos& a = hull[i];
      const PixelPos& b = hull[(i + 1) % n];
      if ((y < a.y() && y < b.y()) || (y > a.y() && y > b.y())) continue;
      if (a.y() == b.y()) {
        lo = std::min({lo, double(a.x()), double(b.x())});
        hi = std::max({hi, double(a.x()), double(b.x())});
        continue;
      }
      const double t = double(y - a.y()) / double(b.y() - a.y());
      const double x = a.x() + t * (b.x() - a.x());
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    if (lo > hi) continue;
    const int x0 = std::max(0, static_cast<int>(std::ceil(lo - kEps)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(hi + kEps)));
    std::uint8_t* row = out.row(y);
    for (int x = x0; x <= x1; ++x) row[x] = 1;
  }
  return out;
}

BinaryMask classical_segment(const GrayFrame& gray) {
  const Histogram hist = histogram(gray);
  const auto t = otsu_threshold(hist);
  if (!t) throw Error(ErrorCode::NoPaperFound, "single-level histogram");
  const auto means = otsu_class_means(hist, *t);
  if (means[1] - means[0] < kMinModeSeparation) {
    throw Error(ErrorCode::NoPaperFound, "histogram is not bimodal");
  }

  BinaryMask bright(gray.width(), gray.height());
  for (std::size_t i = 0; i < bright.data().size(); ++i) {
    bright.data()[i] = gray.data()[i] > *t;
  }
  const Labeling labeling = label_components(bright);
  if (labeling.components.empty()) {
    throw Error(ErrorCode::NoPaperFound, "no bright component");
  }
  const auto best = std::max_element(
      labeling.components.begin(), labeling.components.end(),
      [](const ComponentStats& a, const ComponentStats& b) {
        return a.area < b.area;
      });
  if (best->area < kMinPaperFraction * gray.pixel_count()) {
    throw Error(ErrorCode::NoPaperFound, "bright component is too small");
  }

  // Only the row extremes can be hull vertices.
  std::vector<PixelPos> extremes;
  for (int y = best->min_y; y <= best->max_y; ++y) {
    const std::int32_t* row = labeling.labels.row(y);
    int first = -1, last = -1;
    for (int x = best->min_x; x <= best->max_x; ++x) {
      if (row[x] != best->label) continue;
      if (first < 0) first = x;
      last = x;
    }
    if (first < 0) continue;
    extremes.emplace_back(first, y);
    if (last != first) extremes.emplace_back(last, y);
  }
  return fill_convex_polygon(gray.width(), gray.height(),
                             convex_hull(std::move(extremes)));
}

BinaryMask binarize_external_mask(const GrayFrame& mask, int width,
                                  int height) {
  if (!mask.same_size(width, height)) {
    throw Error(ErrorCode::DimensionMismatch,
                "mask dimensions differ from the input frame");
  }
  BinaryMask out(width, height);
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] = mask.data()[i] >= 128;
  }
  return out;
}

}  // namespace papertab
